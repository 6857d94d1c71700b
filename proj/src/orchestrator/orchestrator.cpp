#include "icnslice/orchestrator/orchestrator.hpp"

#include <deque>

namespace icnslice::orch {

using substrate::ResourceKind;

nlohmann::json
TeardownSummary::toJson() const
{
  nlohmann::json rel = nlohmann::json::object();
  for (const auto& [k, v] : released) {
    rel[substrate::toString(k)] = v;
  }
  return {{"slice_id", id.value}, {"released", rel}, {"forwarders", forwarders}};
}

std::string
toString(AdaptReport::Status status)
{
  switch (status) {
    case AdaptReport::Status::Unchanged:
      return "unchanged";
    case AdaptReport::Status::Shrunk:
      return "shrunk";
    case AdaptReport::Status::Grown:
      return "grown";
    case AdaptReport::Status::Rejected:
      return "rejected";
  }
  return "unknown";
}

nlohmann::json
AdaptReport::toJson() const
{
  nlohmann::json d = nlohmann::json::object();
  for (const auto& [k, v] : delta) {
    d[substrate::toString(k)] = v;
  }
  nlohmann::json j{{"slice_id", id.value}, {"status", toString(status)}, {"delta", d}};
  if (!reason.empty()) {
    j["reason"] = reason;
  }
  return j;
}

Orchestrator::Orchestrator(substrate::Network& net, substrate::CapacityLedger& ledger,
                           LoadModel model, bool cacheEnabled)
  : m_net(net)
  , m_ledger(ledger)
  , m_model(model)
  , m_cacheEnabled(cacheEnabled)
{
}

core::Name
Orchestrator::topologicalName(const NodeId& node)
{
  return core::Name({"poa", node});
}

core::Name
Orchestrator::slicePrefix(const std::string& sliceName)
{
  return core::Name({"conf", sliceName});
}

AllocationMatrix
Orchestrator::embedAll(const std::vector<Subgraph>& subgraphs)
{
  AllocationMatrix all;
  try {
    for (const auto& sub : subgraphs) {
      all.merge(embed(sub, m_net.topology(), m_ledger, all));
    }
  }
  catch (...) {
    releaseAll(all, m_ledger);
    throw;
  }
  return all;
}

SliceId
Orchestrator::createSlice(const SliceTemplate& t)
{
  t.validate();
  if (findByName(t.slice_name)) {
    throw DuplicateSlice("slice " + t.slice_name + " exists");
  }
  for (const auto& site : t.sites) {
    if (!m_net.topology().hasNode(site.poa_node_id)) {
      throw TemplateError("sites", "unknown PoA " + site.poa_node_id);
    }
    if (m_net.topology().node(site.poa_node_id).role != substrate::NodeRole::AccessPoa) {
      throw TemplateError("sites", site.poa_node_id + " is not an access PoA");
    }
  }
  ServiceGraph g = buildServiceGraph(t, m_model);
  auto subgraphs = partition(g, m_net.topology());
  AllocationMatrix alloc = embedAll(subgraphs);
  try {
    return instantiate(alloc, g, t, std::move(subgraphs));
  }
  catch (...) {
    releaseAll(alloc, m_ledger);
    throw;
  }
}

SliceId
Orchestrator::instantiate(const AllocationMatrix& alloc, const ServiceGraph& g,
                          const SliceTemplate& t, std::vector<Subgraph> subgraphs)
{
  SliceRecord rec;
  rec.id = SliceId{m_nextSlice++};
  rec.tmpl = t;
  rec.graph = g;
  rec.subgraphs = std::move(subgraphs);
  rec.alloc = alloc;

  for (const auto& [_, node] : alloc.node_map) {
    rec.nodes.insert(node);
  }
  for (const auto& [_, path] : alloc.link_map) {
    for (const auto& l : path) {
      rec.links.insert(l);
      rec.nodes.insert(m_net.topology().link(l).a);
      rec.nodes.insert(m_net.topology().link(l).b);
    }
  }
  // a site forwarder displaced from its PoA still needs the PoA in the slice
  for (const auto& site : t.sites) {
    const NodeId& image = alloc.node_map.at(siteForwarderId(site.site_id));
    if (image != site.poa_node_id) {
      addPath(rec, site.poa_node_id, image);
    }
  }

  provision(rec);
  SliceId id = rec.id;
  auto& stored = m_slices.emplace(id, std::move(rec)).first->second;
  for (const auto& n : stored.nodes) {
    if (m_net.topology().node(n).role == substrate::NodeRole::AccessPoa) {
      stored.routes[topologicalName(n)] = RouteTarget{n, std::nullopt};
    }
  }
  installAllRoutes(stored);
  m_net.log().record(m_net.clock().now(), "slice_created",
                     {{"slice", id.value}, {"name", t.slice_name},
                      {"forwarders", stored.nodes.size()}});
  return id;
}

TeardownSummary
Orchestrator::teardown(SliceId id)
{
  SliceRecord& rec = record(id);
  TeardownSummary summary;
  summary.id = id;
  for (auto h : rec.alloc.allReservations()) {
    summary.released[m_ledger.resource(h).kind] += m_ledger.amount(h);
    m_ledger.release(h);
  }
  for (const auto& n : rec.nodes) {
    m_net.forwarder(n).removeSlice(id);
  }
  summary.forwarders = rec.nodes.size();
  m_net.log().record(m_net.clock().now(), "slice_deleted",
                     {{"slice", id.value}, {"name", rec.tmpl.slice_name}});
  m_slices.erase(id);
  return summary;
}

AdaptReport
Orchestrator::adapt(SliceId id, const std::vector<int>& expectedParticipants)
{
  SliceRecord& rec = record(id);
  AdaptReport report;
  report.id = id;
  if (expectedParticipants.size() != rec.tmpl.sites.size()) {
    throw TemplateError("sites", "expected " + std::to_string(rec.tmpl.sites.size()) +
                        " participant counts");
  }
  SliceTemplate next = rec.tmpl;
  for (std::size_t i = 0; i < next.sites.size(); ++i) {
    next.sites[i].expected_participants = expectedParticipants[i];
  }
  next.validate();
  ServiceGraph g = buildServiceGraph(next, m_model);

  struct Change
  {
    substrate::ReservationHandle handle;
    std::int64_t from;
    std::int64_t to;
  };
  std::vector<Change> changes;
  for (const auto& v : g.vnodes) {
    for (auto h : rec.alloc.reservations[v.vnode_id]) {
      auto kind = m_ledger.resource(h).kind;
      std::int64_t want = kind == ResourceKind::Compute ? v.compute_units : substrate::mbToKb(v.cache_mb);
      changes.push_back({h, m_ledger.amount(h), want});
    }
  }
  for (const auto& l : g.vlinks) {
    for (auto h : rec.alloc.reservations[l.vlink_id]) {
      changes.push_back({h, m_ledger.amount(h), substrate::mbpsToKbps(l.bandwidth_mbps)});
    }
  }

  bool grows = false;
  bool shrinks = false;
  for (const auto& c : changes) {
    grows = grows || c.to > c.from;
    shrinks = shrinks || c.to < c.from;
  }

  // shrink first so growth can reuse what the slice itself frees
  std::stable_sort(changes.begin(), changes.end(), [] (const Change& x, const Change& y) {
    return (x.to - x.from) < (y.to - y.from);
  });
  std::vector<const Change*> applied;
  try {
    for (const auto& c : changes) {
      if (c.to != c.from) {
        m_ledger.resize(c.handle, c.to);
        applied.push_back(&c);
      }
    }
  }
  catch (const substrate::InsufficientCapacity& e) {
    for (auto it = applied.rbegin(); it != applied.rend(); ++it) {
      m_ledger.resize((*it)->handle, (*it)->from);
    }
    report.status = AdaptReport::Status::Rejected;
    report.reason = e.what();
    return report;
  }

  for (const auto& c : changes) {
    if (c.to != c.from) {
      report.delta[m_ledger.resource(c.handle).kind] += c.to - c.from;
    }
  }
  report.status = grows ? AdaptReport::Status::Grown
                        : (shrinks ? AdaptReport::Status::Shrunk : AdaptReport::Status::Unchanged);
  rec.tmpl = next;
  rec.graph = g;
  provision(rec);
  m_net.log().record(m_net.clock().now(), "slice_adapted",
                     {{"slice", id.value}, {"status", toString(report.status)}});
  return report;
}

const SliceRecord&
Orchestrator::slice(SliceId id) const
{
  auto it = m_slices.find(id);
  if (it == m_slices.end()) {
    throw SliceNotFound(id);
  }
  return it->second;
}

SliceRecord&
Orchestrator::record(SliceId id)
{
  auto it = m_slices.find(id);
  if (it == m_slices.end()) {
    throw SliceNotFound(id);
  }
  return it->second;
}

std::vector<SliceId>
Orchestrator::sliceIds() const
{
  std::vector<SliceId> out;
  for (const auto& [id, _] : m_slices) {
    out.push_back(id);
  }
  return out;
}

std::optional<SliceId>
Orchestrator::findByName(const std::string& name) const
{
  for (const auto& [id, rec] : m_slices) {
    if (rec.tmpl.slice_name == name) {
      return id;
    }
  }
  return std::nullopt;
}

std::uint64_t
Orchestrator::cacheBudgetBytes(const SliceRecord& rec, const NodeId& node) const
{
  if (!m_cacheEnabled) {
    return 0;
  }
  double mb = 0;
  bool hosts = false;
  double transit = 0;
  for (const auto& v : rec.graph.vnodes) {
    if (v.kind == VNodeKind::Forwarder) {
      transit = std::max(transit, v.cache_mb);
    }
    auto it = rec.alloc.node_map.find(v.vnode_id);
    if (it != rec.alloc.node_map.end() && it->second == node) {
      mb += v.cache_mb;
      hosts = true;
    }
  }
  // transit forwarders cache as much as one site forwarder, unreserved
  if (!hosts || mb == 0) {
    mb = transit;
  }
  return static_cast<std::uint64_t>(substrate::mbToKb(mb)) * 1000;
}

void
Orchestrator::provision(SliceRecord& rec)
{
  for (const auto& n : rec.nodes) {
    m_net.forwarder(n).provisionSlice(rec.id, cacheBudgetBytes(rec, n));
  }
}

void
Orchestrator::addPath(SliceRecord& rec, const NodeId& from, const NodeId& to)
{
  const auto& topo = m_net.topology();
  // BFS from `to` gives every node its distance; walk down from `from`
  auto dist = topo.hopDistances(to);
  if (dist.count(from) == 0) {
    throw EmbeddingError(EmbedFailure::Disconnected, "no path " + from + " to " + to);
  }
  NodeId cur = from;
  rec.nodes.insert(cur);
  while (cur != to) {
    std::optional<substrate::Neighbor> step;
    for (const auto& nb : topo.neighbors(cur)) {
      if (dist.at(nb.node) == dist.at(cur) - 1) {
        step = nb;
        break;
      }
    }
    rec.links.insert(step->link);
    cur = step->node;
    rec.nodes.insert(cur);
  }
}

void
Orchestrator::extendTo(SliceId id, const NodeId& node)
{
  SliceRecord& rec = record(id);
  if (rec.nodes.count(node) > 0) {
    return;
  }
  auto dist = m_net.topology().hopDistances(node);
  std::optional<NodeId> nearest;
  for (const auto& n : rec.nodes) {
    if (dist.count(n) > 0 && (!nearest || dist.at(n) < dist.at(*nearest))) {
      nearest = n;
    }
  }
  if (!nearest) {
    throw EmbeddingError(EmbedFailure::Disconnected, node + " cannot reach the slice");
  }
  addPath(rec, node, *nearest);
  provision(rec);
  if (m_net.topology().node(node).role == substrate::NodeRole::AccessPoa) {
    rec.routes[topologicalName(node)] = RouteTarget{node, std::nullopt};
  }
  installAllRoutes(rec);
  m_net.log().record(m_net.clock().now(), "slice_extended",
                     {{"slice", id.value}, {"node", node}});
}

void
Orchestrator::installRoute(SliceId id, const core::Name& prefix, const NodeId& target,
                           std::optional<FaceId> localFace)
{
  SliceRecord& rec = record(id);
  if (rec.nodes.count(target) == 0) {
    extendTo(id, target);
  }
  RouteTarget rt{target, localFace};
  rec.routes[prefix] = rt;
  applyRoute(rec, prefix, rt);
}

void
Orchestrator::withdrawRoute(SliceId id, const core::Name& prefix)
{
  SliceRecord& rec = record(id);
  rec.routes.erase(prefix);
  std::erase_if(rec.local_routes, [&] (const auto& kv) { return kv.first.second == prefix; });
  for (const auto& n : rec.nodes) {
    m_net.forwarder(n).fib(id).erase(prefix);
  }
}

void
Orchestrator::installAllRoutes(SliceRecord& rec)
{
  for (const auto& [prefix, target] : rec.routes) {
    applyRoute(rec, prefix, target);
  }
}

void
Orchestrator::setLocalRoute(SliceId id, const NodeId& node, const core::Name& prefix,
                            std::optional<FaceId> face)
{
  SliceRecord& rec = record(id);
  if (rec.nodes.count(node) == 0) {
    extendTo(id, node);
  }
  if (face) {
    rec.local_routes[{node, prefix}] = *face;
  }
  else {
    rec.local_routes.erase({node, prefix});
  }
  if (auto it = rec.routes.find(prefix); it != rec.routes.end()) {
    applyRoute(rec, prefix, it->second);
  }
  else if (face) {
    m_net.forwarder(node).fib(id).insert(prefix, {*face});
  }
  else {
    m_net.forwarder(node).fib(id).erase(prefix);
  }
}

std::map<NodeId, LinkId>
nextHopsToward(const substrate::Topology& topo, const std::set<NodeId>& nodes,
               const std::set<LinkId>& links, const NodeId& target)
{
  std::map<NodeId, std::vector<substrate::Neighbor>> adj;
  for (const auto& l : links) {
    const auto& link = topo.link(l);
    if (nodes.count(link.a) > 0 && nodes.count(link.b) > 0) {
      adj[link.a].push_back({link.b, l});
      adj[link.b].push_back({link.a, l});
    }
  }

  std::map<NodeId, int> dist{{target, 0}};
  std::deque<NodeId> queue{target};
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    for (const auto& nb : adj[u]) {
      if (dist.emplace(nb.node, dist.at(u) + 1).second) {
        queue.push_back(nb.node);
      }
    }
  }

  std::map<NodeId, LinkId> out;
  for (const auto& [n, d] : dist) {
    if (n == target) {
      continue;
    }
    std::optional<std::tuple<NodeId, LinkId>> best;
    for (const auto& nb : adj[n]) {
      auto nd = dist.find(nb.node);
      if (nd != dist.end() && nd->second == d - 1) {
        std::tuple<NodeId, LinkId> cand{nb.node, nb.link};
        if (!best || cand < *best) {
          best = cand;
        }
      }
    }
    out[n] = std::get<1>(*best);
  }
  return out;
}

void
Orchestrator::applyRoute(const SliceRecord& rec, const core::Name& prefix,
                         const RouteTarget& target)
{
  auto hops = nextHopsToward(m_net.topology(), rec.nodes, rec.links, target.node);
  for (const auto& n : rec.nodes) {
    auto& fib = m_net.forwarder(n).fib(rec.id);
    if (auto pinned = rec.local_routes.find({n, prefix}); pinned != rec.local_routes.end()) {
      fib.insert(prefix, {pinned->second});
    }
    else if (n == target.node && target.face) {
      fib.insert(prefix, {*target.face});
    }
    else if (auto h = hops.find(n); h != hops.end()) {
      fib.insert(prefix, {m_net.linkFace(n, h->second)});
    }
    else {
      fib.erase(prefix);
    }
  }
}

} // namespace icnslice::orch
