#include "icnslice/orchestrator/embedding.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace icnslice::orch {

using substrate::CapacityLedger;
using substrate::ReservationHandle;
using substrate::ResourceKey;
using substrate::ResourceKind;
using substrate::Topology;

std::string
toString(EmbedFailure reason)
{
  switch (reason) {
    case EmbedFailure::Capacity:
      return "capacity";
    case EmbedFailure::Latency:
      return "latency";
    case EmbedFailure::Disconnected:
      return "disconnected";
  }
  return "unknown";
}

std::vector<ReservationHandle>
AllocationMatrix::allReservations() const
{
  std::vector<ReservationHandle> out;
  for (const auto& [_, hs] : reservations) {
    out.insert(out.end(), hs.begin(), hs.end());
  }
  return out;
}

void
AllocationMatrix::merge(const AllocationMatrix& other)
{
  node_map.insert(other.node_map.begin(), other.node_map.end());
  link_map.insert(other.link_map.begin(), other.link_map.end());
  for (const auto& [id, hs] : other.reservations) {
    auto& mine = reservations[id];
    mine.insert(mine.end(), hs.begin(), hs.end());
  }
}

nlohmann::json
AllocationMatrix::toJson() const
{
  nlohmann::json nodes = nlohmann::json::object();
  for (const auto& [v, n] : node_map) {
    nodes[v] = n;
  }
  nlohmann::json links = nlohmann::json::object();
  for (const auto& [l, path] : link_map) {
    links[l] = path;
  }
  return {{"node_map", nodes}, {"link_map", links}};
}

void
releaseAll(const AllocationMatrix& alloc, CapacityLedger& ledger)
{
  for (auto h : alloc.allReservations()) {
    ledger.release(h);
  }
}

double
pathLatency(const Topology& topo, const std::vector<LinkId>& path)
{
  double total = 0;
  for (const auto& l : path) {
    total += topo.link(l).latency_ms;
  }
  return total;
}

std::optional<std::vector<LinkId>>
minLatencyPath(const Topology& topo, const CapacityLedger& ledger, const NodeId& from,
               const NodeId& to, std::int64_t minResidualKbps)
{
  if (from == to) {
    return std::vector<LinkId>{};
  }
  struct Label
  {
    double latency;
    int hops;
    NodeId node;

    bool
    operator>(const Label& o) const
    {
      return std::tie(latency, hops, node) > std::tie(o.latency, o.hops, o.node);
    }
  };

  std::map<NodeId, std::pair<double, int>> best;
  std::map<NodeId, std::pair<NodeId, LinkId>> parent;
  std::priority_queue<Label, std::vector<Label>, std::greater<>> queue;
  best[from] = {0.0, 0};
  queue.push({0.0, 0, from});

  while (!queue.empty()) {
    Label cur = queue.top();
    queue.pop();
    if (std::pair{cur.latency, cur.hops} != best.at(cur.node)) {
      continue;
    }
    if (cur.node == to) {
      break;
    }
    for (const auto& nb : topo.neighbors(cur.node)) {
      if (ledger.residual({ResourceKind::Bandwidth, nb.link}) < minResidualKbps) {
        continue;
      }
      std::pair<double, int> cand{cur.latency + topo.link(nb.link).latency_ms, cur.hops + 1};
      auto it = best.find(nb.node);
      if (it == best.end() || cand < it->second) {
        best[nb.node] = cand;
        parent[nb.node] = {cur.node, nb.link};
        queue.push({cand.first, cand.second, nb.node});
      }
    }
  }

  if (best.count(to) == 0) {
    return std::nullopt;
  }
  std::vector<LinkId> path;
  for (NodeId n = to; n != from; n = parent.at(n).first) {
    path.push_back(parent.at(n).second);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

namespace {

/// Reservations made during one embed() call, released on failure.
class Transaction
{
public:
  explicit
  Transaction(CapacityLedger& ledger)
    : m_ledger(ledger)
  {
  }

  ~Transaction()
  {
    if (!m_committed) {
      for (auto it = m_made.rbegin(); it != m_made.rend(); ++it) {
        m_ledger.release(*it);
      }
    }
  }

  ReservationHandle
  reserve(const ResourceKey& key, std::int64_t amount)
  {
    auto h = m_ledger.allocate(key, amount);
    m_made.push_back(h);
    return h;
  }

  void
  commit()
  {
    m_committed = true;
  }

private:
  CapacityLedger& m_ledger;
  std::vector<ReservationHandle> m_made;
  bool m_committed = false;
};

} // namespace

AllocationMatrix
embed(const Subgraph& sub, const Topology& topo, CapacityLedger& ledger,
      const AllocationMatrix& prior)
{
  Transaction tx(ledger);
  AllocationMatrix out;

  auto pinOf = [&] (const std::string& vnodeId) -> std::optional<NodeId> {
    for (const auto* list : {&sub.vnodes, &sub.remote_vnodes}) {
      for (const auto& v : *list) {
        if (v.vnode_id == vnodeId) {
          return v.pin_hint;
        }
      }
    }
    return std::nullopt;
  };

  std::vector<const VNode*> order;
  for (const auto& v : sub.vnodes) {
    order.push_back(&v);
  }
  std::sort(order.begin(), order.end(), [] (const VNode* x, const VNode* y) {
    if (x->compute_units != y->compute_units) {
      return x->compute_units > y->compute_units;
    }
    return x->vnode_id < y->vnode_id;
  });

  for (const VNode* v : order) {
    std::vector<NodeId> anchors;
    if (v->pin_hint) {
      anchors.push_back(*v->pin_hint);
    }
    else {
      for (const auto& l : sub.vlinks) {
        const std::string* other = l.a == v->vnode_id ? &l.b : (l.b == v->vnode_id ? &l.a : nullptr);
        if (other != nullptr) {
          if (auto pin = pinOf(*other)) {
            anchors.push_back(*pin);
          }
        }
      }
    }
    std::vector<std::map<NodeId, int>> anchorDist;
    for (const auto& a : anchors) {
      anchorDist.push_back(topo.hopDistances(a));
    }

    const std::int64_t storageKb = substrate::mbToKb(v->cache_mb);
    std::optional<NodeId> chosen;
    long bestScore = std::numeric_limits<long>::max();
    for (const auto& [id, node] : topo.nodes()) {
      if (node.domain != sub.domain_id || (v->pin_hint && *v->pin_hint != id)) {
        continue;
      }
      if (v->compute_units > 0 && ledger.residual({ResourceKind::Compute, id}) < v->compute_units) {
        continue;
      }
      if (storageKb > 0 && ledger.residual({ResourceKind::Storage, id}) < storageKb) {
        continue;
      }
      long score = 0;
      for (const auto& d : anchorDist) {
        auto it = d.find(id);
        score += it == d.end() ? 1000000 : it->second;
      }
      // nodes are visited in id order, so strict < keeps the lowest id on ties
      if (score < bestScore) {
        bestScore = score;
        chosen = id;
      }
    }
    if (!chosen) {
      throw EmbeddingError(EmbedFailure::Capacity,
                           v->pin_hint ? *v->pin_hint + " cannot host " + v->vnode_id
                                       : "no node in domain " + sub.domain_id + " can host " +
                                           v->vnode_id);
    }
    auto& held = out.reservations[v->vnode_id];
    if (v->compute_units > 0) {
      held.push_back(tx.reserve({ResourceKind::Compute, *chosen}, v->compute_units));
    }
    if (storageKb > 0) {
      held.push_back(tx.reserve({ResourceKind::Storage, *chosen}, storageKb));
    }
    out.node_map[v->vnode_id] = *chosen;
  }

  auto imageOf = [&] (const std::string& vnodeId) -> std::optional<NodeId> {
    if (auto it = out.node_map.find(vnodeId); it != out.node_map.end()) {
      return it->second;
    }
    if (auto it = prior.node_map.find(vnodeId); it != prior.node_map.end()) {
      return it->second;
    }
    return std::nullopt;
  };

  std::vector<const VLink*> links;
  for (const auto& l : sub.vlinks) {
    links.push_back(&l);
  }
  std::sort(links.begin(), links.end(),
            [] (const VLink* x, const VLink* y) { return x->vlink_id < y->vlink_id; });

  for (const VLink* l : links) {
    if (prior.link_map.count(l->vlink_id) > 0) {
      continue;
    }
    auto ia = imageOf(l->a);
    auto ib = imageOf(l->b);
    if (!ia || !ib) {
      // the other domain maps this border stub once its end is placed
      continue;
    }
    const std::int64_t kbps = substrate::mbpsToKbps(l->bandwidth_mbps);
    auto path = minLatencyPath(topo, ledger, *ia, *ib, kbps);
    if (!path) {
      if (minLatencyPath(topo, ledger, *ia, *ib, 0)) {
        throw EmbeddingError(EmbedFailure::Capacity,
                             "no path with " + std::to_string(kbps) + " kbps residual for " +
                             l->vlink_id);
      }
      throw EmbeddingError(EmbedFailure::Disconnected, "no path for " + l->vlink_id);
    }
    double latency = pathLatency(topo, *path);
    if (latency > l->latency_budget_ms) {
      throw EmbeddingError(EmbedFailure::Latency,
                           l->vlink_id + " needs " + std::to_string(latency) +
                           " ms, budget " + std::to_string(l->latency_budget_ms) + " ms");
    }
    auto& held = out.reservations[l->vlink_id];
    if (kbps > 0) {
      for (const auto& link : *path) {
        held.push_back(tx.reserve({ResourceKind::Bandwidth, link}, kbps));
      }
    }
    out.link_map[l->vlink_id] = *path;
  }

  tx.commit();
  return out;
}

} // namespace icnslice::orch
