#ifndef ICNSLICE_API_ENGINE_HPP
#define ICNSLICE_API_ENGINE_HPP

#include "icnslice/api/errors.hpp"
#include "icnslice/api/scenario.hpp"
#include "icnslice/mobility/mobility.hpp"
#include "icnslice/orchestrator/monitor.hpp"

#include <deque>

namespace icnslice::api {

inline constexpr int SCHEMA_VERSION = 1;

struct EngineOptions
{
  std::uint64_t seed = 42;
  bool cache_enabled = true;
  /// Period of monitor snapshots in the event log; 0 turns them off.
  double monitor_period_ms = 1000;
  /// Time a script keeps running after its last command.
  double settle_ms = 5000;
  /// Keep every event log record in memory.
  bool retain_log = true;
  conf::ConferenceConfig conference;
  orch::LoadModel load;
};

/// Outcome of one command.
struct CommandResult
{
  int status = 200;
  nlohmann::json body;
};

/** \brief The whole emulation: substrate, orchestrator and services.
 *
 *  Every mutation goes through execute(), which runs as a single event on
 *  the clock, so views are always taken between events.
 */
class Engine
{
public:
  Engine(substrate::Topology topo, EngineOptions options = {});
  ~Engine();

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const EngineOptions&
  options() const
  {
    return m_options;
  }

  const substrate::Topology&
  topology() const
  {
    return m_topo;
  }

  substrate::EventClock&
  clock()
  {
    return m_clock;
  }

  substrate::EventLog&
  log()
  {
    return m_log;
  }

  substrate::Network&
  network()
  {
    return m_net;
  }

  substrate::CapacityLedger&
  ledger()
  {
    return m_ledger;
  }

  orch::Orchestrator&
  orchestrator()
  {
    return m_orch;
  }

  const orch::Monitor&
  monitor() const
  {
    return m_monitor;
  }

  mob::MobilityService&
  mobility()
  {
    return m_mobility;
  }

  conf::Conference&
  conference(SliceId slice);

  /// Slice by numeric id or by name.
  SliceId
  resolveSlice(const nlohmann::json& ref) const;

  /// Runs a command right now, inside the current event. Throws ApiError.
  nlohmann::json
  execute(const std::string& command, const nlohmann::json& args);

  /// Queues a command one tick from now and runs the clock until it completes.
  CommandResult
  submit(const std::string& command, const nlohmann::json& args);

  /// Queues a command for \p at; failures are logged, not thrown.
  void
  schedule(SimTime at, const std::string& command, nlohmann::json args);

  /// Runs every command of \p script and then settles; returns final metrics.
  nlohmann::json
  runScript(const ScenarioScript& script);

  void
  runUntil(SimTime t);

  /// Consistent snapshot of slices, forwarders, PoAs and metrics.
  nlohmann::json
  views() const;

  nlohmann::json
  metrics() const;

  nlohmann::json
  sliceView(SliceId slice) const;

  nlohmann::json
  forwarderView(const NodeId& node) const;

  /// Control-plane events with sequence number above \p since.
  nlohmann::json
  eventsSince(std::uint64_t since, std::size_t limit = 500) const;

  std::uint64_t
  lastEventSeq() const
  {
    return m_eventSeq;
  }

private:
  CommandResult
  executeLogged(const std::string& command, const nlohmann::json& args);

  std::pair<conf::Conference*, std::string>
  participantRef(const nlohmann::json& args);

private:
  substrate::Topology m_topo;
  EngineOptions m_options;
  substrate::EventClock m_clock;
  substrate::EventLog m_log;
  substrate::Network m_net;
  substrate::CapacityLedger m_ledger;
  orch::Orchestrator m_orch;
  orch::Monitor m_monitor;
  mob::MobilityService m_mobility;
  std::map<SliceId, std::unique_ptr<conf::Conference>> m_conferences;
  std::deque<std::pair<std::uint64_t, std::string>> m_events;
  std::uint64_t m_eventSeq = 0;
  std::optional<SimTime> m_stopAt;
};

} // namespace icnslice::api

#endif // ICNSLICE_API_ENGINE_HPP
