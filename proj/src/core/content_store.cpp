#include "icnslice/core/content_store.hpp"

namespace icnslice::core {

const Data*
ContentStore::find(const Name& name, SimTime now)
{
  auto it = m_index.find(name);
  if (it == m_index.end()) {
    return nullptr;
  }
  auto entry = it->second;
  if (now >= entry->inserted_at + SimTime::fromMs(entry->data.freshness_ms)) {
    erase(entry);
    return nullptr;
  }
  entry->last_hit = now;
  m_lru.splice(m_lru.begin(), m_lru, entry);
  return &entry->data;
}

bool
ContentStore::insert(const Data& data, SimTime now)
{
  std::uint64_t size = wireSize(data);
  if (size > m_budget || data.freshness_ms <= 0) {
    return false;
  }
  if (auto it = m_index.find(data.name); it != m_index.end()) {
    erase(it->second);
  }
  evictTo(m_budget - size);
  m_lru.push_front(CsEntry{data, now, now});
  m_index.emplace(data.name, m_lru.begin());
  m_used += size;
  return true;
}

void
ContentStore::setBudget(std::uint64_t budgetBytes)
{
  m_budget = budgetBytes;
  evictTo(m_budget);
}

void
ContentStore::evictTo(std::uint64_t limit)
{
  while (m_used > limit && !m_lru.empty()) {
    erase(std::prev(m_lru.end()));
  }
}

void
ContentStore::erase(std::list<CsEntry>::iterator it)
{
  m_used -= wireSize(it->data);
  m_index.erase(it->data.name);
  m_lru.erase(it);
}

std::vector<Name>
ContentStore::lruOrder() const
{
  std::vector<Name> names;
  for (auto it = m_lru.rbegin(); it != m_lru.rend(); ++it) {
    names.push_back(it->data.name);
  }
  return names;
}

} // namespace icnslice::core
