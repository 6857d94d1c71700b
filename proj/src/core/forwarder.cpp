#include "icnslice/core/forwarder.hpp"

#include <algorithm>

namespace icnslice::core {

Forwarder::Forwarder(NodeId node)
  : m_node(std::move(node))
{
}

void
Forwarder::provisionSlice(SliceId slice, std::uint64_t csBudgetBytes)
{
  auto it = m_tables.find(slice);
  if (it == m_tables.end()) {
    SliceTables t;
    t.cs = ContentStore(csBudgetBytes);
    m_tables.emplace(slice, std::move(t));
  }
  else {
    it->second.cs.setBudget(csBudgetBytes);
  }
}

bool
Forwarder::removeSlice(SliceId slice)
{
  return m_tables.erase(slice) > 0;
}

std::vector<SliceId>
Forwarder::slices() const
{
  std::vector<SliceId> out;
  for (const auto& [id, _] : m_tables) {
    out.push_back(id);
  }
  return out;
}

SliceTables&
Forwarder::tables(SliceId slice)
{
  auto it = m_tables.find(slice);
  if (it == m_tables.end()) {
    throw UnknownSlice(slice);
  }
  return it->second;
}

const SliceTables&
Forwarder::tables(SliceId slice) const
{
  auto it = m_tables.find(slice);
  if (it == m_tables.end()) {
    throw UnknownSlice(slice);
  }
  return it->second;
}

ForwardingActions
Forwarder::nackUpstream(SliceTables& t, FaceId inFace, const Interest& interest, NackReason reason)
{
  ForwardingActions actions;
  ++t.counters.nacks;
  actions.out.push_back({inFace, Nack{interest.slice, interest.name, interest.nonce, reason,
                                      interest.forwarding_hint}});
  actions.outcome = InterestOutcome::NoRoute;
  return actions;
}

ForwardingActions
Forwarder::onInterest(FaceId inFace, Interest interest, SimTime now)
{
  auto it = m_tables.find(interest.slice);
  if (it == m_tables.end()) {
    ++m_noSliceNacks;
    ForwardingActions actions;
    actions.out.push_back({inFace, Nack{interest.slice, interest.name, interest.nonce,
                                        NackReason::NoSlice, interest.forwarding_hint}});
    actions.outcome = InterestOutcome::NoSlice;
    return actions;
  }
  SliceTables& t = it->second;
  ++t.counters.interests_in;
  ++interest.hop_count;
  interest.trace.push_back(m_node);

  // a hint naming this forwarder has done its job
  if (interest.forwarding_hint && m_topoName && *interest.forwarding_hint == *m_topoName) {
    interest.forwarding_hint.reset();
  }

  ForwardingActions actions;

  if (const Data* cached = t.cs.find(interest.name, now)) {
    ++t.counters.cs_hits;
    ++t.counters.data_out;
    actions.out.push_back({inFace, *cached});
    actions.outcome = InterestOutcome::CsHit;
    return actions;
  }

  PitKey key{interest.name, interest.forwarding_hint};
  if (PitEntry* entry = t.pit.find(key)) {
    if (entry->hasNonce(interest.nonce)) {
      ++t.counters.drops;
      actions.outcome = InterestOutcome::LoopDropped;
      return actions;
    }
  }
  if (PitEntry* entry = t.pit.find(key); entry != nullptr && entry->upstream_expiry > now) {
    entry->downstream.push_back({inFace, interest.nonce});
    entry->expiry = std::max(entry->expiry, now + SimTime::fromMs(interest.lifetime_ms));
    ++t.counters.pit_aggregations;
    actions.wakeAt = entry->expiry;
    actions.wakeSlice = interest.slice;
    actions.outcome = InterestOutcome::Aggregated;
    return actions;
  }

  InterestDecision decision;
  if (m_resolver) {
    decision = m_resolver(interest.slice, interest, inFace, now);
    if (!interest.forwarding_hint && decision.hint &&
        !(m_topoName && *decision.hint == *m_topoName)) {
      interest.forwarding_hint = decision.hint;
    }
  }

  const Name& lookup = interest.forwarding_hint ? *interest.forwarding_hint : interest.name;
  const FibEntry* route = t.fib.findLongestPrefixMatch(lookup);
  if (route == nullptr || route->nexthops.empty()) {
    return nackUpstream(t, inFace, interest, NackReason::NoRoute);
  }

  FaceId nexthop = route->nexthops.front();
  SimTime expiry = now + SimTime::fromMs(interest.lifetime_ms);
  if (decision.holdUntil) {
    expiry = std::max(expiry, *decision.holdUntil);
  }

  SimTime upstreamExpiry = now + SimTime::fromMs(interest.lifetime_ms);
  if (PitEntry* stale = t.pit.find(PitKey{interest.name, interest.forwarding_hint})) {
    // the earlier upstream Interest has lapsed; this one replaces it
    stale->downstream.push_back({inFace, interest.nonce});
    stale->upstream = {nexthop};
    stale->upstream_expiry = upstreamExpiry;
    stale->expiry = std::max(stale->expiry, expiry);
    stale->forwarded = interest;
    expiry = stale->expiry;
  }
  else {
    PitEntry entry;
    entry.name = interest.name;
    entry.hint = interest.forwarding_hint;
    entry.downstream.push_back({inFace, interest.nonce});
    entry.upstream.insert(nexthop);
    entry.expiry = expiry;
    entry.upstream_expiry = upstreamExpiry;
    entry.forwarded = interest;
    t.pit.insert(std::move(entry));
  }

  ++t.counters.interests_out;
  actions.wakeAt = expiry;
  actions.wakeSlice = interest.slice;
  actions.out.push_back({nexthop, std::move(interest)});
  actions.outcome = InterestOutcome::Forwarded;
  return actions;
}

ForwardingActions
Forwarder::onData(FaceId inFace, const Data& data, SimTime now)
{
  ForwardingActions actions;
  auto it = m_tables.find(data.slice);
  if (it == m_tables.end()) {
    return actions;
  }
  SliceTables& t = it->second;
  ++t.counters.data_in;

  auto keys = t.pit.keysForName(data.name);
  if (keys.empty()) {
    ++t.counters.unsolicited;
    return actions;
  }

  std::vector<FaceId> faces;
  for (const auto& key : keys) {
    const PitEntry* entry = t.pit.find(key);
    for (const auto& rec : entry->downstream) {
      if (rec.face != inFace && std::find(faces.begin(), faces.end(), rec.face) == faces.end()) {
        faces.push_back(rec.face);
      }
    }
    t.pit.erase(key);
  }

  for (FaceId f : faces) {
    ++t.counters.data_out;
    actions.out.push_back({f, data});
  }
  t.cs.insert(data, now);
  return actions;
}

ForwardingActions
Forwarder::onNack(FaceId inFace, const Nack& nack, SimTime)
{
  ForwardingActions actions;
  auto it = m_tables.find(nack.slice);
  if (it == m_tables.end()) {
    return actions;
  }
  SliceTables& t = it->second;
  ++t.counters.nacks_in;

  std::optional<Name> hint = nack.forwarding_hint;
  if (hint && m_topoName && *hint == *m_topoName) {
    hint.reset();
  }
  PitKey key{nack.name, hint};
  PitEntry* entry = t.pit.find(key);
  if (entry == nullptr || entry->upstream.count(inFace) == 0) {
    return actions;
  }
  for (const auto& rec : entry->downstream) {
    actions.out.push_back({rec.face, Nack{nack.slice, nack.name, rec.nonce, nack.reason,
                                          std::nullopt}});
  }
  t.pit.erase(key);
  return actions;
}

namespace {

void
sweepTables(SliceId slice, SliceTables& t, SimTime now, SweepResult& result)
{
  auto& entries = t.pit.entries();
  for (auto it = entries.begin(); it != entries.end();) {
    const PitEntry& e = it->second;
    if (e.expiry > now) {
      ++it;
      continue;
    }
    for (const auto& rec : e.downstream) {
      result.actions.out.push_back({rec.face, Nack{slice, e.name, rec.nonce,
                                                   NackReason::Timeout, std::nullopt}});
    }
    ++t.counters.timeouts;
    ++result.expired;
    result.entries.push_back({slice, e.name, e.hint});
    it = entries.erase(it);
  }
}

} // namespace

SweepResult
Forwarder::pitSweep(SimTime now)
{
  SweepResult result;
  for (auto& [slice, t] : m_tables) {
    sweepTables(slice, t, now, result);
  }
  return result;
}

SweepResult
Forwarder::pitSweep(SliceId slice, SimTime now)
{
  SweepResult result;
  auto it = m_tables.find(slice);
  if (it != m_tables.end()) {
    sweepTables(slice, it->second, now, result);
  }
  return result;
}

std::optional<SimTime>
Forwarder::holdPending(SliceId slice, const Name& prefix, SimTime until)
{
  auto it = m_tables.find(slice);
  if (it == m_tables.end()) {
    return std::nullopt;
  }
  std::optional<SimTime> latest;
  for (const auto& key : it->second.pit.keysUnder(prefix)) {
    PitEntry* e = it->second.pit.find(key);
    e->expiry = std::max(e->expiry, until);
    latest = std::max(latest.value_or(e->expiry), e->expiry);
  }
  return latest;
}

ForwardingActions
Forwarder::reexpressPending(SliceId slice, const Name& prefix, const std::optional<Name>& hint,
                            const std::function<std::uint64_t()>& nextNonce, SimTime now)
{
  ForwardingActions actions;
  auto it = m_tables.find(slice);
  if (it == m_tables.end()) {
    return actions;
  }
  SliceTables& t = it->second;

  for (const auto& key : t.pit.keysUnder(prefix)) {
    if (key.hint) {
      continue;
    }
    const FibEntry* route = t.fib.findLongestPrefixMatch(hint ? *hint : key.name);
    if (route == nullptr || route->nexthops.empty()) {
      continue;
    }
    FaceId nexthop = route->nexthops.front();
    PitEntry* e = t.pit.find(key);
    Interest again = e->forwarded;
    again.nonce = nextNonce();
    again.forwarding_hint = hint;
    e->forwarded = again;
    e->upstream = {nexthop};
    e->upstream_expiry = now + SimTime::fromMs(again.lifetime_ms);
    e->expiry = std::max(e->expiry, e->upstream_expiry);
    actions.wakeAt = std::min(actions.wakeAt.value_or(e->expiry), e->expiry);
    actions.wakeSlice = slice;
    ++t.counters.reexpressions;
    actions.out.push_back({nexthop, std::move(again)});
  }
  return actions;
}

void
Forwarder::removeFace(FaceId face)
{
  for (auto& [_, t] : m_tables) {
    t.fib.removeFace(face);
  }
}

} // namespace icnslice::core
