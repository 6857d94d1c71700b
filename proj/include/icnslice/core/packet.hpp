#ifndef ICNSLICE_CORE_PACKET_HPP
#define ICNSLICE_CORE_PACKET_HPP

#include "icnslice/common.hpp"
#include "icnslice/core/name.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace icnslice::core {

inline constexpr std::uint32_t DEFAULT_INTEREST_LIFETIME_MS = 4000;
inline constexpr std::uint32_t DEFAULT_FRESHNESS_MS = 10000;

struct Interest
{
  SliceId slice;
  Name name{"_"};
  std::uint64_t nonce = 0;
  std::uint32_t lifetime_ms = DEFAULT_INTEREST_LIFETIME_MS;
  std::uint32_t hop_count = 0;
  /// Topological name to route by instead of `name` (late binding).
  std::optional<Name> forwarding_hint;
  /// Topological name of the PoA where the Interest entered the network.
  std::optional<Name> ingress;
  /// Forwarders visited, in order. Emulator instrumentation only.
  std::vector<NodeId> trace;
};

struct Data
{
  SliceId slice;
  Name name{"_"};
  std::uint32_t payload_len_bytes = 0;
  std::vector<std::uint8_t> payload;
  /// Carried opaquely, never verified.
  std::vector<std::uint8_t> signature;
  std::uint32_t freshness_ms = DEFAULT_FRESHNESS_MS;
};

enum class NackReason {
  NoRoute,
  NoSlice,
  Timeout,
};

std::string
toString(NackReason reason);

struct Nack
{
  SliceId slice;
  Name name{"_"};
  std::uint64_t nonce = 0;
  NackReason reason = NackReason::NoRoute;
  std::optional<Name> forwarding_hint;
};

using Packet = std::variant<Interest, Data, Nack>;

/// Bytes a packet occupies on a link.
std::uint32_t
wireSize(const Packet& packet);

SliceId
sliceOf(const Packet& packet);

const Name&
nameOf(const Packet& packet);

const char*
kindOf(const Packet& packet);

} // namespace icnslice::core

#endif // ICNSLICE_CORE_PACKET_HPP
