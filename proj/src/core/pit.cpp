#include "icnslice/core/pit.hpp"

#include <algorithm>

namespace icnslice::core {

bool
PitEntry::hasNonce(std::uint64_t nonce) const
{
  return std::any_of(downstream.begin(), downstream.end(),
                     [nonce] (const DownstreamRecord& r) { return r.nonce == nonce; });
}

PitEntry*
Pit::find(const PitKey& key)
{
  auto it = m_entries.find(key);
  return it == m_entries.end() ? nullptr : &it->second;
}

PitEntry&
Pit::insert(PitEntry entry)
{
  PitKey key{entry.name, entry.hint};
  auto [it, _] = m_entries.insert_or_assign(std::move(key), std::move(entry));
  return it->second;
}

bool
Pit::erase(const PitKey& key)
{
  return m_entries.erase(key) > 0;
}

std::vector<PitKey>
Pit::keysForName(const Name& name) const
{
  std::vector<PitKey> keys;
  for (auto it = m_entries.lower_bound(PitKey{name, std::nullopt});
       it != m_entries.end() && it->first.name == name; ++it) {
    keys.push_back(it->first);
  }
  return keys;
}

std::vector<PitKey>
Pit::keysUnder(const Name& prefix) const
{
  std::vector<PitKey> keys;
  for (auto it = m_entries.lower_bound(PitKey{prefix, std::nullopt});
       it != m_entries.end() && prefix.isPrefixOf(it->first.name); ++it) {
    keys.push_back(it->first);
  }
  return keys;
}

} // namespace icnslice::core
