#include "icnslice/core/packet.hpp"

namespace icnslice::core {

namespace {

constexpr std::uint32_t INTEREST_HEADER_BYTES = 48;
constexpr std::uint32_t DATA_HEADER_BYTES = 64;
constexpr std::uint32_t NACK_HEADER_BYTES = 40;

std::uint32_t
nameBytes(const Name& name)
{
  return static_cast<std::uint32_t>(name.toUri().size());
}

} // namespace

std::string
toString(NackReason reason)
{
  switch (reason) {
    case NackReason::NoRoute:
      return "no-route";
    case NackReason::NoSlice:
      return "no-slice";
    case NackReason::Timeout:
      return "timeout";
  }
  return "unknown";
}

std::uint32_t
wireSize(const Packet& packet)
{
  return std::visit([] (const auto& p) -> std::uint32_t {
    using T = std::decay_t<decltype(p)>;
    if constexpr (std::is_same_v<T, Interest>) {
      std::uint32_t size = INTEREST_HEADER_BYTES + nameBytes(p.name);
      if (p.forwarding_hint) {
        size += nameBytes(*p.forwarding_hint);
      }
      return size;
    }
    else if constexpr (std::is_same_v<T, Data>) {
      return DATA_HEADER_BYTES + nameBytes(p.name) + p.payload_len_bytes +
             static_cast<std::uint32_t>(p.signature.size());
    }
    else {
      return NACK_HEADER_BYTES + nameBytes(p.name);
    }
  }, packet);
}

SliceId
sliceOf(const Packet& packet)
{
  return std::visit([] (const auto& p) { return p.slice; }, packet);
}

const Name&
nameOf(const Packet& packet)
{
  return std::visit([] (const auto& p) -> const Name& { return p.name; }, packet);
}

const char*
kindOf(const Packet& packet)
{
  switch (packet.index()) {
    case 0:
      return "interest";
    case 1:
      return "data";
    default:
      return "nack";
  }
}

} // namespace icnslice::core
