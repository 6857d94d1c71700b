#ifndef ICNSLICE_CORE_FORWARDER_HPP
#define ICNSLICE_CORE_FORWARDER_HPP

#include "icnslice/common.hpp"
#include "icnslice/core/content_store.hpp"
#include "icnslice/core/fib.hpp"
#include "icnslice/core/packet.hpp"
#include "icnslice/core/pit.hpp"

#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace icnslice::core {

class UnknownSlice : public std::runtime_error
{
public:
  explicit
  UnknownSlice(SliceId id)
    : std::runtime_error("unknown slice " + std::to_string(id.value))
  {
  }
};

/// Per-slice packet counters. Conservation holds at every operation boundary:
/// interests_in == interests_out + cs_hits + pit_aggregations + drops + nacks.
struct SliceCounters
{
  std::uint64_t interests_in = 0;
  std::uint64_t interests_out = 0;
  std::uint64_t data_in = 0;
  std::uint64_t data_out = 0;
  std::uint64_t cs_hits = 0;
  std::uint64_t pit_aggregations = 0;
  std::uint64_t nacks = 0;
  std::uint64_t drops = 0;
  // outside the conservation identity
  std::uint64_t timeouts = 0;
  std::uint64_t nacks_in = 0;
  std::uint64_t unsolicited = 0;
  std::uint64_t reexpressions = 0;

  bool
  conserved() const
  {
    return interests_in == interests_out + cs_hits + pit_aggregations + drops + nacks;
  }

  friend bool
  operator==(const SliceCounters&, const SliceCounters&) = default;
};

struct SliceTables
{
  Pit pit;
  ContentStore cs;
  Fib fib;
  SliceCounters counters;
};

struct OutPacket
{
  FaceId face;
  Packet packet;
};

enum class InterestOutcome {
  CsHit,
  Aggregated,
  Forwarded,
  NoRoute,
  NoSlice,
  LoopDropped,
};

struct ForwardingActions
{
  std::vector<OutPacket> out;
  /// Earliest time a PIT entry touched by this operation may expire.
  std::optional<SimTime> wakeAt;
  /// Slice whose PIT wakeAt refers to.
  SliceId wakeSlice;
  std::optional<InterestOutcome> outcome;
};

struct ExpiredEntry
{
  SliceId slice;
  Name name;
  std::optional<Name> hint;
};

struct SweepResult
{
  std::size_t expired = 0;
  ForwardingActions actions;
  std::vector<ExpiredEntry> entries;
};

/// What a resolver may ask of the forwarding pipeline for a new Interest.
struct InterestDecision
{
  /// Route by this topological name instead of the content name.
  std::optional<Name> hint;
  /// Keep the PIT entry alive at least until this time.
  std::optional<SimTime> holdUntil;
};

using InterestResolver =
  std::function<InterestDecision(SliceId, const Interest&, FaceId inFace, SimTime now)>;

/** \brief One node's forwarding engine, holding PIT/CS/FIB state per slice.
 *
 *  Operations on a slice touch only that slice's tables and counters.
 */
class Forwarder
{
public:
  explicit
  Forwarder(NodeId node);

  const NodeId&
  nodeId() const
  {
    return m_node;
  }

  /// Creates the slice's tables, or updates the cache budget if they exist.
  void
  provisionSlice(SliceId slice, std::uint64_t csBudgetBytes);

  bool
  removeSlice(SliceId slice);

  bool
  hasSlice(SliceId slice) const
  {
    return m_tables.count(slice) > 0;
  }

  std::vector<SliceId>
  slices() const;

  SliceTables&
  tables(SliceId slice);

  const SliceTables&
  tables(SliceId slice) const;

  Fib&
  fib(SliceId slice)
  {
    return tables(slice).fib;
  }

  const SliceCounters&
  counters(SliceId slice) const
  {
    return tables(slice).counters;
  }

  /// Interests for slices not provisioned here.
  std::uint64_t
  noSliceNacks() const
  {
    return m_noSliceNacks;
  }

  /// Hints equal to this name are consumed here rather than routed.
  void
  setTopologicalName(std::optional<Name> name)
  {
    m_topoName = std::move(name);
  }

  const std::optional<Name>&
  topologicalName() const
  {
    return m_topoName;
  }

  void
  setResolver(InterestResolver resolver)
  {
    m_resolver = std::move(resolver);
  }

  ForwardingActions
  onInterest(FaceId inFace, Interest interest, SimTime now);

  ForwardingActions
  onData(FaceId inFace, const Data& data, SimTime now);

  ForwardingActions
  onNack(FaceId inFace, const Nack& nack, SimTime now);

  /// Removes every PIT entry with expiry <= now and NACKs its downstream.
  SweepResult
  pitSweep(SimTime now);

  /// As pitSweep(now), restricted to one slice.
  SweepResult
  pitSweep(SliceId slice, SimTime now);

  /// Pushes expiry of pending entries under \p prefix out to at least \p until.
  std::optional<SimTime>
  holdPending(SliceId slice, const Name& prefix, SimTime until);

  /// Re-expresses every pending entry under \p prefix toward \p hint, keeping
  /// its downstream records. Entries already routed by a hint are skipped.
  /// Without a hint each entry is routed again by its own name.
  ForwardingActions
  reexpressPending(SliceId slice, const Name& prefix, const std::optional<Name>& hint,
                   const std::function<std::uint64_t()>& nextNonce, SimTime now);

  /// Drops \p face from every slice's FIB.
  void
  removeFace(FaceId face);

private:
  ForwardingActions
  nackUpstream(SliceTables& t, FaceId inFace, const Interest& interest, NackReason reason);

private:
  NodeId m_node;
  std::optional<Name> m_topoName;
  std::map<SliceId, SliceTables> m_tables;
  InterestResolver m_resolver;
  std::uint64_t m_noSliceNacks = 0;
};

} // namespace icnslice::core

#endif // ICNSLICE_CORE_FORWARDER_HPP
