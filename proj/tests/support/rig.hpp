// Small driver around Engine for behaviour tests.
#ifndef ICNSLICE_TESTS_RIG_HPP
#define ICNSLICE_TESTS_RIG_HPP

#include "icnslice/api/engine.hpp"

namespace icnslice::testing {

inline substrate::Topology
fixtureTopology(const std::string& file)
{
  return substrate::Topology::loadFile(std::string(ICNSLICE_FIXTURES) + "/" + file);
}

inline nlohmann::json
conferenceTemplate(const std::string& name, const NodeId& poaA, const NodeId& poaB,
                   bool mobility = false, double latency = 60, std::int64_t kbps = 1000,
                   int participants = 3)
{
  return {{"slice_name", name},
          {"sites", {{{"site_id", "a"}, {"poa_node_id", poaA}, {"expected_participants", participants}},
                     {{"site_id", "b"}, {"poa_node_id", poaB}, {"expected_participants", participants}}}},
          {"per_stream_kbps", kbps},
          {"latency_bound_ms", latency},
          {"mobility_enabled", mobility}};
}

class Rig
{
public:
  explicit
  Rig(const std::string& topoFile = "demo-topology.json", api::EngineOptions options = monitorOff())
    : engine(fixtureTopology(topoFile), options)
  {
  }

  static api::EngineOptions
  monitorOff()
  {
    api::EngineOptions o;
    o.monitor_period_ms = 0;
    return o;
  }

  /// Runs a command and returns its body; fails loudly on a non-2xx status.
  nlohmann::json
  must(const std::string& cmd, const nlohmann::json& args)
  {
    auto r = engine.submit(cmd, args);
    if (r.status >= 300) {
      throw std::runtime_error(cmd + " failed: " + r.body.dump());
    }
    return r.body;
  }

  api::CommandResult
  attempt(const std::string& cmd, const nlohmann::json& args)
  {
    return engine.submit(cmd, args);
  }

  SliceId
  create(const nlohmann::json& tmpl)
  {
    return SliceId{must("create_slice", tmpl)["slice_id"].get<std::uint32_t>()};
  }

  void
  join(SliceId s, const std::string& pid, const NodeId& poa, std::vector<std::string> roles,
       std::optional<std::string> iface = std::nullopt)
  {
    nlohmann::json args{{"slice", s.value}, {"participant", pid}, {"poa", poa}, {"roles", roles}};
    if (iface) {
      args["iface"] = *iface;
    }
    must("join", args);
  }

  void
  advance(double ms)
  {
    engine.runUntil(engine.clock().now() + SimTime::fromMs(ms));
  }

  conf::Participant&
  participant(SliceId s, const std::string& pid)
  {
    return engine.conference(s).participant(pid);
  }

  /// Conservation identity on every forwarder of every slice.
  bool
  conserved()
  {
    for (const auto& [id, _] : engine.topology().nodes()) {
      const auto& f = engine.network().forwarder(id);
      for (auto s : f.slices()) {
        if (!f.counters(s).conserved()) {
          return false;
        }
      }
    }
    return true;
  }

  api::Engine engine;
};

} // namespace icnslice::testing

#endif
