#ifndef ICNSLICE_ORCHESTRATOR_SERVICE_GRAPH_HPP
#define ICNSLICE_ORCHESTRATOR_SERVICE_GRAPH_HPP

#include "icnslice/orchestrator/slice_template.hpp"
#include "icnslice/substrate/topology.hpp"

#include <optional>
#include <set>

namespace icnslice::orch {

enum class VNodeKind {
  Forwarder,
  ServiceFunction,
  Storage,
};

std::string
toString(VNodeKind kind);

struct VNode
{
  std::string vnode_id;
  VNodeKind kind = VNodeKind::Forwarder;
  std::int64_t compute_units = 0;
  double cache_mb = 0;
  std::optional<NodeId> pin_hint;
  /// Site served, for site forwarders.
  std::optional<std::string> site_id;
};

struct VLink
{
  std::string vlink_id;
  std::string a;
  std::string b;
  double bandwidth_mbps = 0;
  double latency_budget_ms = 0;
};

struct ServiceGraph
{
  std::vector<VNode> vnodes;
  std::vector<VLink> vlinks;

  const VNode&
  vnode(const std::string& id) const;

  const VLink&
  vlink(const std::string& id) const;

  bool
  isConnected() const;

  nlohmann::json
  toJson() const;
};

/// Constants of the conference load model.
struct LoadModel
{
  double mbps_per_compute_unit = 100.0;
  std::int64_t sync_compute_units = 1;
  /// Control traffic each participant exchanges with the sync function.
  std::int64_t sync_kbps_per_participant = 64;
};

inline const std::string SYNC_VNODE_ID = "sync";

std::string
siteForwarderId(const std::string& siteId);

/** \brief Derives the virtual service graph for a conference template.
 *
 *  One forwarder per site pinned at its PoA, one sync service function, and
 *  vlinks site-sync and site-site. With P total participants, p_s at site s
 *  and per-stream rate r kbps:
 *    - site throughput T_s = p_s * (P - 1) * r / 1000 Mbps
 *    - compute units = ceil(T_s / mbps_per_compute_unit)
 *    - cache_mb = cache_window_s * P * r / 8000
 *    - site-site bandwidth = p_s * p_u * r / 1000 Mbps
 *  Every vlink's latency budget is the template's latency bound.
 */
ServiceGraph
buildServiceGraph(const SliceTemplate& t, const LoadModel& model = {});

struct Subgraph
{
  std::string domain_id;
  std::vector<VNode> vnodes;
  /// Internal vlinks plus cut vlinks (border stubs) touching this domain.
  std::vector<VLink> vlinks;
  /// Ids of cut vlinks; each appears in both adjacent subgraphs.
  std::set<std::string> border_stubs;
  /// Vnodes of other domains at the far end of a border stub.
  std::vector<VNode> remote_vnodes;
};

/// Groups vnodes by the domain of their pin. Unpinned vnodes go to the
/// domain with the most adjacent pinned vnodes; ties pick the lowest domain id.
std::vector<Subgraph>
partition(const ServiceGraph& g, const substrate::Topology& topo);

/// Domain chosen for every vnode by partition().
std::map<std::string, std::string>
domainAssignment(const ServiceGraph& g, const substrate::Topology& topo);

} // namespace icnslice::orch

#endif // ICNSLICE_ORCHESTRATOR_SERVICE_GRAPH_HPP
