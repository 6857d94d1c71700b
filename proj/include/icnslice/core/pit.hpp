#ifndef ICNSLICE_CORE_PIT_HPP
#define ICNSLICE_CORE_PIT_HPP

#include "icnslice/common.hpp"
#include "icnslice/core/packet.hpp"

#include <map>
#include <optional>
#include <set>
#include <vector>

namespace icnslice::core {

/// PIT entries are keyed by name and forwarding hint, so a late-bound
/// re-expression passing a forwarder twice is not mistaken for a duplicate.
struct PitKey
{
  Name name;
  std::optional<Name> hint;

  friend auto operator<=>(const PitKey&, const PitKey&) = default;
  friend bool operator==(const PitKey&, const PitKey&) = default;
};

struct DownstreamRecord
{
  FaceId face;
  std::uint64_t nonce = 0;
};

struct PitEntry
{
  Name name{"_"};
  std::optional<Name> hint;
  std::vector<DownstreamRecord> downstream;
  std::set<FaceId> upstream;
  SimTime expiry;
  /// Lifetime end of the Interest last sent upstream. Past it nothing is
  /// coming back, so a matching Interest goes out again instead of waiting.
  SimTime upstream_expiry;
  /// The Interest as last sent upstream; re-expression starts from it.
  Interest forwarded;

  bool
  hasNonce(std::uint64_t nonce) const;
};

class Pit
{
public:
  PitEntry*
  find(const PitKey& key);

  PitEntry&
  insert(PitEntry entry);

  bool
  erase(const PitKey& key);

  /// Keys of every entry whose name equals \p name, regardless of hint.
  std::vector<PitKey>
  keysForName(const Name& name) const;

  /// Keys of every entry whose name falls under \p prefix.
  std::vector<PitKey>
  keysUnder(const Name& prefix) const;

  std::size_t
  size() const
  {
    return m_entries.size();
  }

  const std::map<PitKey, PitEntry>&
  entries() const
  {
    return m_entries;
  }

  std::map<PitKey, PitEntry>&
  entries()
  {
    return m_entries;
  }

private:
  std::map<PitKey, PitEntry> m_entries;
};

} // namespace icnslice::core

#endif // ICNSLICE_CORE_PIT_HPP
