#include "icnslice/orchestrator/service_graph.hpp"

#include <algorithm>
#include <deque>

namespace icnslice::orch {

std::string
toString(VNodeKind kind)
{
  switch (kind) {
    case VNodeKind::Forwarder:
      return "forwarder";
    case VNodeKind::ServiceFunction:
      return "service_function";
    case VNodeKind::Storage:
      return "storage";
  }
  return "unknown";
}

std::string
siteForwarderId(const std::string& siteId)
{
  return "fwd-" + siteId;
}

const VNode&
ServiceGraph::vnode(const std::string& id) const
{
  for (const auto& v : vnodes) {
    if (v.vnode_id == id) {
      return v;
    }
  }
  throw std::out_of_range("unknown vnode " + id);
}

const VLink&
ServiceGraph::vlink(const std::string& id) const
{
  for (const auto& l : vlinks) {
    if (l.vlink_id == id) {
      return l;
    }
  }
  throw std::out_of_range("unknown vlink " + id);
}

bool
ServiceGraph::isConnected() const
{
  if (vnodes.empty()) {
    return true;
  }
  std::set<std::string> seen{vnodes.front().vnode_id};
  std::deque<std::string> queue{vnodes.front().vnode_id};
  while (!queue.empty()) {
    auto u = queue.front();
    queue.pop_front();
    for (const auto& l : vlinks) {
      const std::string* other = nullptr;
      if (l.a == u) {
        other = &l.b;
      }
      else if (l.b == u) {
        other = &l.a;
      }
      if (other != nullptr && seen.insert(*other).second) {
        queue.push_back(*other);
      }
    }
  }
  return seen.size() == vnodes.size();
}

nlohmann::json
ServiceGraph::toJson() const
{
  auto vn = nlohmann::json::array();
  for (const auto& v : vnodes) {
    nlohmann::json j = {{"vnode_id", v.vnode_id}, {"kind", toString(v.kind)},
                        {"compute_units", v.compute_units}, {"cache_mb", v.cache_mb}};
    if (v.pin_hint) {
      j["pin_hint"] = *v.pin_hint;
    }
    vn.push_back(std::move(j));
  }
  auto vl = nlohmann::json::array();
  for (const auto& l : vlinks) {
    vl.push_back({{"vlink_id", l.vlink_id}, {"a", l.a}, {"b", l.b},
                  {"bandwidth_mbps", l.bandwidth_mbps},
                  {"latency_budget_ms", l.latency_budget_ms}});
  }
  return {{"vnodes", vn}, {"vlinks", vl}};
}

ServiceGraph
buildServiceGraph(const SliceTemplate& t, const LoadModel& model)
{
  t.validate();
  const std::int64_t total = t.totalParticipants();
  const std::int64_t rate = t.per_stream_kbps;
  const std::int64_t kbpsPerUnit = static_cast<std::int64_t>(std::llround(model.mbps_per_compute_unit * 1000));
  const double cacheMb = t.cache_window_s * static_cast<double>(total) * static_cast<double>(rate) / 8000.0;

  ServiceGraph g;
  for (const auto& site : t.sites) {
    // each local participant sends to and receives from the P - 1 others, so
    // egress and ingress are both p_s * (P - 1) streams
    std::int64_t throughputKbps = site.expected_participants * (total - 1) * rate;
    std::int64_t units = std::max<std::int64_t>(1, (throughputKbps + kbpsPerUnit - 1) / kbpsPerUnit);

    VNode v;
    v.vnode_id = siteForwarderId(site.site_id);
    v.kind = VNodeKind::Forwarder;
    v.compute_units = units;
    v.cache_mb = cacheMb;
    v.pin_hint = site.poa_node_id;
    v.site_id = site.site_id;
    g.vnodes.push_back(std::move(v));
  }

  VNode sync;
  sync.vnode_id = SYNC_VNODE_ID;
  sync.kind = VNodeKind::ServiceFunction;
  sync.compute_units = model.sync_compute_units;
  sync.cache_mb = 0;
  g.vnodes.push_back(std::move(sync));

  for (const auto& site : t.sites) {
    VLink l;
    l.vlink_id = "vl-" + site.site_id + "-" + SYNC_VNODE_ID;
    l.a = siteForwarderId(site.site_id);
    l.b = SYNC_VNODE_ID;
    l.bandwidth_mbps = static_cast<double>(site.expected_participants * model.sync_kbps_per_participant) / 1000.0;
    l.latency_budget_ms = t.latency_bound_ms;
    g.vlinks.push_back(std::move(l));
  }
  for (std::size_t i = 0; i < t.sites.size(); ++i) {
    for (std::size_t j = i + 1; j < t.sites.size(); ++j) {
      const auto& s = t.sites[i];
      const auto& u = t.sites[j];
      VLink l;
      l.vlink_id = "vl-" + s.site_id + "-" + u.site_id;
      l.a = siteForwarderId(s.site_id);
      l.b = siteForwarderId(u.site_id);
      // p_s * p_u streams each way; the reservation covers the larger direction
      std::int64_t kbps = static_cast<std::int64_t>(s.expected_participants) * u.expected_participants * rate;
      l.bandwidth_mbps = static_cast<double>(kbps) / 1000.0;
      l.latency_budget_ms = t.latency_bound_ms;
      g.vlinks.push_back(std::move(l));
    }
  }
  return g;
}

std::map<std::string, std::string>
domainAssignment(const ServiceGraph& g, const substrate::Topology& topo)
{
  std::map<std::string, std::string> domain;
  for (const auto& v : g.vnodes) {
    if (v.pin_hint) {
      domain[v.vnode_id] = topo.node(*v.pin_hint).domain;
    }
  }
  for (const auto& v : g.vnodes) {
    if (v.pin_hint) {
      continue;
    }
    std::map<std::string, int> votes;
    for (const auto& l : g.vlinks) {
      const std::string* other = l.a == v.vnode_id ? &l.b : (l.b == v.vnode_id ? &l.a : nullptr);
      if (other == nullptr) {
        continue;
      }
      if (auto it = domain.find(*other); it != domain.end() && g.vnode(*other).pin_hint) {
        ++votes[it->second];
      }
    }
    std::string best;
    int bestVotes = -1;
    // map iteration is in domain-id order, so strict > keeps the lowest id on ties
    for (const auto& [d, n] : votes) {
      if (n > bestVotes) {
        best = d;
        bestVotes = n;
      }
    }
    if (bestVotes < 0) {
      best = topo.domains().front();
    }
    domain[v.vnode_id] = best;
  }
  return domain;
}

std::vector<Subgraph>
partition(const ServiceGraph& g, const substrate::Topology& topo)
{
  auto domain = domainAssignment(g, topo);
  std::map<std::string, Subgraph> subs;
  for (const auto& v : g.vnodes) {
    auto& sub = subs[domain.at(v.vnode_id)];
    sub.domain_id = domain.at(v.vnode_id);
    sub.vnodes.push_back(v);
  }
  for (const auto& l : g.vlinks) {
    const auto& da = domain.at(l.a);
    const auto& db = domain.at(l.b);
    if (da == db) {
      subs.at(da).vlinks.push_back(l);
      continue;
    }
    for (const auto& [mine, remote] : {std::pair{da, l.b}, std::pair{db, l.a}}) {
      auto& sub = subs.at(mine);
      sub.vlinks.push_back(l);
      sub.border_stubs.insert(l.vlink_id);
      auto& rv = sub.remote_vnodes;
      if (std::none_of(rv.begin(), rv.end(), [&] (const VNode& x) { return x.vnode_id == remote; })) {
        rv.push_back(g.vnode(remote));
      }
    }
  }
  std::vector<Subgraph> out;
  for (auto& [_, s] : subs) {
    out.push_back(std::move(s));
  }
  return out;
}

} // namespace icnslice::orch
