#ifndef ICNSLICE_ORCHESTRATOR_ORCHESTRATOR_HPP
#define ICNSLICE_ORCHESTRATOR_ORCHESTRATOR_HPP

#include "icnslice/core/name.hpp"
#include "icnslice/orchestrator/embedding.hpp"
#include "icnslice/substrate/network.hpp"

#include <map>
#include <set>

namespace icnslice::orch {

class SliceNotFound : public std::runtime_error
{
public:
  explicit
  SliceNotFound(SliceId id)
    : std::runtime_error("unknown slice " + std::to_string(id.value))
  {
  }
};

class DuplicateSlice : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct RouteTarget
{
  NodeId node;
  /// Face on the target node itself; none when the target consumes the name.
  std::optional<FaceId> face;
};

/// Everything the orchestrator keeps about one live slice.
struct SliceRecord
{
  SliceId id;
  SliceTemplate tmpl;
  ServiceGraph graph;
  std::vector<Subgraph> subgraphs;
  AllocationMatrix alloc;
  /// Forwarders holding the slice's tables.
  std::set<NodeId> nodes;
  /// Substrate links the slice forwards over.
  std::set<LinkId> links;
  std::map<core::Name, RouteTarget> routes;
  /// Per-node FIB entries that take precedence over routes, e.g. a producer
  /// that attached away from the node its route points at.
  std::map<std::pair<NodeId, core::Name>, FaceId> local_routes;
};

/** \brief Next hop toward \p target for every node of a forwarding graph.
 *
 *  Breadth-first over \p links restricted to \p nodes; among equally distant
 *  neighbors the lowest (node id, link id) wins. Unreachable nodes and the
 *  target itself are absent from the result.
 */
std::map<NodeId, LinkId>
nextHopsToward(const substrate::Topology& topo, const std::set<NodeId>& nodes,
               const std::set<LinkId>& links, const NodeId& target);

struct TeardownSummary
{
  SliceId id;
  std::map<substrate::ResourceKind, std::int64_t> released;
  std::size_t forwarders = 0;

  nlohmann::json
  toJson() const;
};

struct AdaptReport
{
  enum class Status {
    Unchanged,
    Shrunk,
    Grown,
    Rejected,
  };

  SliceId id;
  Status status = Status::Unchanged;
  /// Net change in reserved amount per resource kind; negative means released.
  std::map<substrate::ResourceKind, std::int64_t> delta;
  std::string reason;

  nlohmann::json
  toJson() const;
};

std::string
toString(AdaptReport::Status status);

/** \brief Turns templates into running slices and keeps slice routing current.
 *
 *  Also plays the controller role: installs name routes into every slice
 *  forwarder along the slice's own forwarding graph.
 */
class Orchestrator
{
public:
  Orchestrator(substrate::Network& net, substrate::CapacityLedger& ledger, LoadModel model = {},
               bool cacheEnabled = true);

  const LoadModel&
  loadModel() const
  {
    return m_model;
  }

  /// Embeds every subgraph in domain order; atomic across the whole graph.
  AllocationMatrix
  embedAll(const std::vector<Subgraph>& subgraphs);

  SliceId
  instantiate(const AllocationMatrix& alloc, const ServiceGraph& g, const SliceTemplate& t,
              std::vector<Subgraph> subgraphs = {});

  /// Template intake, graph generation, partition, embedding and instantiation.
  SliceId
  createSlice(const SliceTemplate& t);

  TeardownSummary
  teardown(SliceId id);

  AdaptReport
  adapt(SliceId id, const std::vector<int>& expectedParticipants);

  bool
  hasSlice(SliceId id) const
  {
    return m_slices.count(id) > 0;
  }

  const SliceRecord&
  slice(SliceId id) const;

  std::vector<SliceId>
  sliceIds() const;

  std::optional<SliceId>
  findByName(const std::string& name) const;

  /// Routes \p prefix toward \p target on every forwarder of the slice.
  void
  installRoute(SliceId id, const core::Name& prefix, const NodeId& target,
               std::optional<FaceId> localFace = std::nullopt);

  void
  withdrawRoute(SliceId id, const core::Name& prefix);

  /// Pins \p prefix to \p face on \p node alone; none clears the pin.
  void
  setLocalRoute(SliceId id, const NodeId& node, const core::Name& prefix,
                std::optional<FaceId> face);

  /// Joins \p node to the slice along the fewest-hop path to it.
  void
  extendTo(SliceId id, const NodeId& node);

  /// Topological name of a PoA, `/poa/<node>`.
  static core::Name
  topologicalName(const NodeId& node);

  static core::Name
  slicePrefix(const std::string& sliceName);

private:
  SliceRecord&
  record(SliceId id);

  void
  provision(SliceRecord& rec);

  void
  installAllRoutes(SliceRecord& rec);

  void
  applyRoute(const SliceRecord& rec, const core::Name& prefix, const RouteTarget& target);

  std::uint64_t
  cacheBudgetBytes(const SliceRecord& rec, const NodeId& node) const;

  void
  addPath(SliceRecord& rec, const NodeId& from, const NodeId& to);

private:
  substrate::Network& m_net;
  substrate::CapacityLedger& m_ledger;
  LoadModel m_model;
  bool m_cacheEnabled;
  std::map<SliceId, SliceRecord> m_slices;
  std::uint32_t m_nextSlice = 1;
};

} // namespace icnslice::orch

#endif // ICNSLICE_ORCHESTRATOR_ORCHESTRATOR_HPP
