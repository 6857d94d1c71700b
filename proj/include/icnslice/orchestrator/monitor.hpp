#ifndef ICNSLICE_ORCHESTRATOR_MONITOR_HPP
#define ICNSLICE_ORCHESTRATOR_MONITOR_HPP

#include "icnslice/orchestrator/orchestrator.hpp"

namespace icnslice::orch {

/// Counters of one slice summed over its forwarders.
struct SliceMetrics
{
  SliceId id;
  std::string name;
  core::SliceCounters totals;
  std::map<NodeId, core::SliceCounters> per_node;
  std::size_t pit_entries = 0;
  std::uint64_t cs_bytes = 0;

  double
  cacheHitRatio() const;

  nlohmann::json
  toJson() const;
};

nlohmann::json
countersToJson(const core::SliceCounters& c);

/// Reads slice counters out of the forwarders and logs periodic snapshots.
class Monitor
{
public:
  Monitor(substrate::Network& net, const Orchestrator& orch)
    : m_net(net)
    , m_orch(orch)
  {
  }

  SliceMetrics
  collect(SliceId id) const;

  std::vector<SliceMetrics>
  collectAll() const;

  /// Logs one "monitor" record per slice now and every \p periodMs after.
  void
  start(double periodMs);

  void
  stop()
  {
    m_running = false;
  }

private:
  void
  tick(double periodMs, std::uint64_t generation);

private:
  substrate::Network& m_net;
  const Orchestrator& m_orch;
  bool m_running = false;
  std::uint64_t m_generation = 0;
};

} // namespace icnslice::orch

#endif // ICNSLICE_ORCHESTRATOR_MONITOR_HPP
