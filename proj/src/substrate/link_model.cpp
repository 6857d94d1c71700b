#include "icnslice/substrate/link_model.hpp"

#include <algorithm>

namespace icnslice::substrate {

SimTime
serializationDelay(std::uint32_t packetBytes, double bandwidthMbps)
{
  if (bandwidthMbps <= 0) {
    return SimTime{0};
  }
  // bits / (Mbit/s) yields microseconds
  double us = static_cast<double>(packetBytes) * 8.0 / bandwidthMbps;
  return SimTime{static_cast<std::int64_t>(std::llround(us))};
}

SimTime
arrivalTime(const PhysLink& link, std::uint32_t packetBytes, SimTime at)
{
  if (packetBytes == 0) {
    throw std::invalid_argument("packet must have a positive size");
  }
  return at + SimTime::fromMs(link.latency_ms) + serializationDelay(packetBytes, link.bandwidth_mbps);
}

SimTime
Channel::transmit(int direction, std::uint32_t lane, std::uint32_t packetBytes, SimTime at)
{
  if (!m_up) {
    throw LinkDown("link is down");
  }
  if (packetBytes == 0) {
    throw std::invalid_argument("packet must have a positive size");
  }
  auto& busy = m_busyUntil[{direction, lane}];
  SimTime departure = std::max(at, busy);
  SimTime done = departure + serializationDelay(packetBytes, m_params.bandwidth_mbps);
  busy = done;
  return done + SimTime::fromMs(m_params.latency_ms);
}

void
Channel::setUp(bool up)
{
  if (m_up && !up) {
    ++m_generation;
    m_busyUntil.clear();
  }
  m_up = up;
}

} // namespace icnslice::substrate
