#ifndef ICNSLICE_CORE_CONTENT_STORE_HPP
#define ICNSLICE_CORE_CONTENT_STORE_HPP

#include "icnslice/common.hpp"
#include "icnslice/core/packet.hpp"

#include <list>
#include <map>
#include <vector>

namespace icnslice::core {

struct CsEntry
{
  Data data;
  SimTime inserted_at;
  SimTime last_hit;
};

/** \brief Byte-budgeted in-network cache with LRU replacement.
 *
 *  An entry occupies wireSize(data) bytes. Entries past their freshness
 *  period are discarded on lookup. A budget of zero disables caching.
 */
class ContentStore
{
public:
  explicit
  ContentStore(std::uint64_t budgetBytes = 0)
    : m_budget(budgetBytes)
  {
  }

  /// Returns the cached Data for \p name and marks it most recently used.
  const Data*
  find(const Name& name, SimTime now);

  /// Returns true when the Data was admitted.
  bool
  insert(const Data& data, SimTime now);

  void
  setBudget(std::uint64_t budgetBytes);

  std::uint64_t
  budget() const
  {
    return m_budget;
  }

  std::uint64_t
  usedBytes() const
  {
    return m_used;
  }

  std::size_t
  size() const
  {
    return m_lru.size();
  }

  /// Names from least to most recently used.
  std::vector<Name>
  lruOrder() const;

private:
  void
  evictTo(std::uint64_t limit);

  void
  erase(std::list<CsEntry>::iterator it);

private:
  std::uint64_t m_budget;
  std::uint64_t m_used = 0;
  // front = most recently used
  std::list<CsEntry> m_lru;
  std::map<Name, std::list<CsEntry>::iterator> m_index;
};

} // namespace icnslice::core

#endif // ICNSLICE_CORE_CONTENT_STORE_HPP
