#ifndef ICNSLICE_ORCHESTRATOR_EMBEDDING_HPP
#define ICNSLICE_ORCHESTRATOR_EMBEDDING_HPP

#include "icnslice/orchestrator/service_graph.hpp"
#include "icnslice/substrate/ledger.hpp"

namespace icnslice::orch {

enum class EmbedFailure {
  Capacity,
  Latency,
  Disconnected,
};

std::string
toString(EmbedFailure reason);

class EmbeddingError : public std::runtime_error
{
public:
  EmbeddingError(EmbedFailure reason, const std::string& detail)
    : std::runtime_error(toString(reason) + ": " + detail)
    , m_reason(reason)
    , m_detail(detail)
  {
  }

  EmbedFailure
  reason() const
  {
    return m_reason;
  }

  const std::string&
  detail() const
  {
    return m_detail;
  }

private:
  EmbedFailure m_reason;
  std::string m_detail;
};

/// Resource allocation matrix: where each vnode and vlink landed, and what it holds.
struct AllocationMatrix
{
  std::map<std::string, NodeId> node_map;
  /// Ordered substrate links; empty when both ends share a node.
  std::map<std::string, std::vector<LinkId>> link_map;
  /// Reservations per vnode or vlink id.
  std::map<std::string, std::vector<substrate::ReservationHandle>> reservations;

  std::vector<substrate::ReservationHandle>
  allReservations() const;

  /// Adds \p other's entries; ids must not overlap.
  void
  merge(const AllocationMatrix& other);

  nlohmann::json
  toJson() const;
};

/// Releases every reservation held by \p alloc.
void
releaseAll(const AllocationMatrix& alloc, substrate::CapacityLedger& ledger);

/// Sum of link latencies along \p path.
double
pathLatency(const substrate::Topology& topo, const std::vector<LinkId>& path);

/** \brief Maps one subgraph onto its domain, greedily.
 *
 *  Vnodes go in order of descending compute (ties by id). A pinned vnode goes
 *  on its pin node or the subgraph fails. An unpinned vnode goes to the feasible
 *  node of the domain with the least summed hop distance to its neighbors' pins,
 *  ties picking the lowest node id. Each vlink whose ends are both placed then takes the
 *  minimum-latency path with enough residual bandwidth on every hop.
 *
 *  \p prior carries placements from subgraphs embedded earlier, which border
 *  stubs need. Returns only what this call added. On any failure every
 *  reservation made by this call is released before EmbeddingError is thrown.
 */
AllocationMatrix
embed(const Subgraph& sub, const substrate::Topology& topo, substrate::CapacityLedger& ledger,
      const AllocationMatrix& prior = {});

/// Minimum-latency path between two nodes using only links with at least
/// \p minResidualKbps left. Empty optional if none exists.
std::optional<std::vector<LinkId>>
minLatencyPath(const substrate::Topology& topo, const substrate::CapacityLedger& ledger,
               const NodeId& from, const NodeId& to, std::int64_t minResidualKbps);

} // namespace icnslice::orch

#endif // ICNSLICE_ORCHESTRATOR_EMBEDDING_HPP
