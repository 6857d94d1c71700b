#ifndef ICNSLICE_SUBSTRATE_LINK_MODEL_HPP
#define ICNSLICE_SUBSTRATE_LINK_MODEL_HPP

#include "icnslice/substrate/topology.hpp"

#include <map>
#include <utility>

namespace icnslice::substrate {

class LinkDown : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct ChannelParams
{
  double latency_ms = 0;
  /// Zero means serialization takes no time (local application faces).
  double bandwidth_mbps = 0;
};

SimTime
serializationDelay(std::uint32_t packetBytes, double bandwidthMbps);

/// Arrival time of a packet sent at \p at on an idle link:
/// at + latency + bytes * 8 / (bandwidth * 1000) ms.
SimTime
arrivalTime(const PhysLink& link, std::uint32_t packetBytes, SimTime at);

/** \brief One full-duplex link instance with per-direction, per-lane FIFO queues.
 *
 *  Each slice transmits in its own lane, so packets of one slice queue only
 *  behind packets of the same slice.
 */
class Channel
{
public:
  explicit
  Channel(ChannelParams params)
    : m_params(params)
  {
  }

  const ChannelParams&
  params() const
  {
    return m_params;
  }

  /// Returns the arrival time at the far end. Throws LinkDown when disabled.
  SimTime
  transmit(int direction, std::uint32_t lane, std::uint32_t packetBytes, SimTime at);

  void
  setUp(bool up);

  bool
  isUp() const
  {
    return m_up;
  }

  /// Bumped whenever the channel goes down; packets in flight across a
  /// down period are lost.
  std::uint64_t
  generation() const
  {
    return m_generation;
  }

private:
  ChannelParams m_params;
  bool m_up = true;
  std::uint64_t m_generation = 0;
  std::map<std::pair<int, std::uint32_t>, SimTime> m_busyUntil;
};

} // namespace icnslice::substrate

#endif // ICNSLICE_SUBSTRATE_LINK_MODEL_HPP
