#ifndef ICNSLICE_SUBSTRATE_LEDGER_HPP
#define ICNSLICE_SUBSTRATE_LEDGER_HPP

#include "icnslice/substrate/topology.hpp"

#include <compare>
#include <map>

namespace icnslice::substrate {

class InsufficientCapacity : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class ResourceKind {
  Compute,   ///< compute units on a node
  Storage,   ///< kilobytes on a node
  Bandwidth, ///< kbps on an infrastructure link
};

std::string
toString(ResourceKind kind);

struct ResourceKey
{
  ResourceKind kind = ResourceKind::Compute;
  std::string id;

  friend auto operator<=>(const ResourceKey&, const ResourceKey&) = default;
  friend bool operator==(const ResourceKey&, const ResourceKey&) = default;
};

struct ReservationHandle
{
  std::uint64_t id = 0;

  friend auto operator<=>(const ReservationHandle&, const ReservationHandle&) = default;
};

std::int64_t
mbpsToKbps(double mbps);

std::int64_t
mbToKb(double mb);

/// Used amount per resource; two snapshots compare field by field.
using LedgerSnapshot = std::map<ResourceKey, std::int64_t>;

/** \brief Capacity accounting over a topology.
 *
 *  Amounts are integers in the unit of each ResourceKind, so releasing a
 *  reservation restores the previous state exactly.
 */
class CapacityLedger
{
public:
  explicit
  CapacityLedger(const Topology& topo);

  /// Throws InsufficientCapacity if the residual is below \p amount.
  ReservationHandle
  allocate(const ResourceKey& key, std::int64_t amount);

  void
  release(ReservationHandle handle);

  /// Changes a reservation's amount in place.
  void
  resize(ReservationHandle handle, std::int64_t amount);

  std::int64_t
  amount(ReservationHandle handle) const;

  const ResourceKey&
  resource(ReservationHandle handle) const;

  std::int64_t
  capacity(const ResourceKey& key) const;

  std::int64_t
  used(const ResourceKey& key) const;

  std::int64_t
  residual(const ResourceKey& key) const
  {
    return capacity(key) - used(key);
  }

  std::size_t
  outstanding() const
  {
    return m_reservations.size();
  }

  LedgerSnapshot
  snapshot() const
  {
    return m_used;
  }

private:
  struct Reservation
  {
    ResourceKey key;
    std::int64_t amount;
  };

  std::map<ResourceKey, std::int64_t> m_capacity;
  std::map<ResourceKey, std::int64_t> m_used;
  std::map<std::uint64_t, Reservation> m_reservations;
  std::uint64_t m_nextHandle = 1;
};

} // namespace icnslice::substrate

#endif // ICNSLICE_SUBSTRATE_LEDGER_HPP
