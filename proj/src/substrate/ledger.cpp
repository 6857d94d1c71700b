#include "icnslice/substrate/ledger.hpp"

namespace icnslice::substrate {

std::string
toString(ResourceKind kind)
{
  switch (kind) {
    case ResourceKind::Compute:
      return "compute";
    case ResourceKind::Storage:
      return "storage";
    case ResourceKind::Bandwidth:
      return "bandwidth";
  }
  return "unknown";
}

std::int64_t
mbpsToKbps(double mbps)
{
  return static_cast<std::int64_t>(std::llround(mbps * 1000.0));
}

std::int64_t
mbToKb(double mb)
{
  return static_cast<std::int64_t>(std::llround(mb * 1000.0));
}

CapacityLedger::CapacityLedger(const Topology& topo)
{
  for (const auto& [id, n] : topo.nodes()) {
    m_capacity[{ResourceKind::Compute, id}] = n.compute_capacity;
    m_capacity[{ResourceKind::Storage, id}] = n.storage_capacity_mb * 1000;
    m_used[{ResourceKind::Compute, id}] = 0;
    m_used[{ResourceKind::Storage, id}] = 0;
  }
  for (const auto& [id, l] : topo.links()) {
    if (l.isAccess()) {
      continue;
    }
    m_capacity[{ResourceKind::Bandwidth, id}] = mbpsToKbps(l.bandwidth_mbps);
    m_used[{ResourceKind::Bandwidth, id}] = 0;
  }
}

ReservationHandle
CapacityLedger::allocate(const ResourceKey& key, std::int64_t amount)
{
  if (amount <= 0) {
    throw std::invalid_argument("reservation amount must be positive");
  }
  if (residual(key) < amount) {
    throw InsufficientCapacity(toString(key.kind) + " on " + key.id + ": requested " +
                               std::to_string(amount) + ", residual " +
                               std::to_string(residual(key)));
  }
  m_used[key] += amount;
  ReservationHandle h{m_nextHandle++};
  m_reservations.emplace(h.id, Reservation{key, amount});
  return h;
}

void
CapacityLedger::release(ReservationHandle handle)
{
  auto it = m_reservations.find(handle.id);
  if (it == m_reservations.end()) {
    throw std::invalid_argument("unknown reservation " + std::to_string(handle.id));
  }
  m_used[it->second.key] -= it->second.amount;
  m_reservations.erase(it);
}

void
CapacityLedger::resize(ReservationHandle handle, std::int64_t amount)
{
  auto it = m_reservations.find(handle.id);
  if (it == m_reservations.end()) {
    throw std::invalid_argument("unknown reservation " + std::to_string(handle.id));
  }
  if (amount <= 0) {
    throw std::invalid_argument("reservation amount must be positive");
  }
  auto& r = it->second;
  std::int64_t delta = amount - r.amount;
  if (delta > 0 && residual(r.key) < delta) {
    throw InsufficientCapacity(toString(r.key.kind) + " on " + r.key.id + ": growth of " +
                               std::to_string(delta) + " exceeds residual " +
                               std::to_string(residual(r.key)));
  }
  m_used[r.key] += delta;
  r.amount = amount;
}

std::int64_t
CapacityLedger::amount(ReservationHandle handle) const
{
  return m_reservations.at(handle.id).amount;
}

const ResourceKey&
CapacityLedger::resource(ReservationHandle handle) const
{
  return m_reservations.at(handle.id).key;
}

std::int64_t
CapacityLedger::capacity(const ResourceKey& key) const
{
  auto it = m_capacity.find(key);
  if (it == m_capacity.end()) {
    throw std::out_of_range(toString(key.kind) + " resource " + key.id + " does not exist");
  }
  return it->second;
}

std::int64_t
CapacityLedger::used(const ResourceKey& key) const
{
  auto it = m_used.find(key);
  return it == m_used.end() ? 0 : it->second;
}

} // namespace icnslice::substrate
