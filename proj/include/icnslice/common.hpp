#ifndef ICNSLICE_COMMON_HPP
#define ICNSLICE_COMMON_HPP

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace icnslice {

using NodeId = std::string;
using LinkId = std::string;

/// Identifies one network slice. Slice 0 is reserved for in-band control traffic.
struct SliceId
{
  std::uint32_t value = 0;

  friend auto operator<=>(const SliceId&, const SliceId&) = default;
};

inline constexpr SliceId CONTROL_SLICE{0};

inline std::ostream&
operator<<(std::ostream& os, SliceId id)
{
  return os << id.value;
}

/// Handle of one face on one forwarder. Unique per node only.
struct FaceId
{
  std::uint32_t value = 0;

  friend auto operator<=>(const FaceId&, const FaceId&) = default;
};

inline constexpr FaceId INVALID_FACE{0};

inline std::ostream&
operator<<(std::ostream& os, FaceId id)
{
  return os << id.value;
}

/// Simulated time with microsecond resolution. One tick is the smallest step.
struct SimTime
{
  std::int64_t us = 0;

  static SimTime
  fromMs(double ms)
  {
    return SimTime{static_cast<std::int64_t>(std::llround(ms * 1000.0))};
  }

  static constexpr SimTime
  tick()
  {
    return SimTime{1};
  }

  double
  ms() const
  {
    return static_cast<double>(us) / 1000.0;
  }

  friend auto operator<=>(const SimTime&, const SimTime&) = default;

  friend SimTime
  operator+(SimTime a, SimTime b)
  {
    return SimTime{a.us + b.us};
  }

  friend SimTime
  operator-(SimTime a, SimTime b)
  {
    return SimTime{a.us - b.us};
  }
};

inline std::ostream&
operator<<(std::ostream& os, SimTime t)
{
  return os << t.ms() << "ms";
}

/// 64-bit FNV-1a, used to derive stable per-component RNG seeds.
inline std::uint64_t
stableHash(std::string_view text, std::uint64_t seed = 0xcbf29ce484222325ULL)
{
  std::uint64_t h = seed;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

} // namespace icnslice

template<>
struct std::hash<icnslice::SliceId>
{
  std::size_t
  operator()(icnslice::SliceId id) const noexcept
  {
    return std::hash<std::uint32_t>{}(id.value);
  }
};

template<>
struct std::hash<icnslice::FaceId>
{
  std::size_t
  operator()(icnslice::FaceId id) const noexcept
  {
    return std::hash<std::uint32_t>{}(id.value);
  }
};

#endif // ICNSLICE_COMMON_HPP
