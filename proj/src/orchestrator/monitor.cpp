#include "icnslice/orchestrator/monitor.hpp"

namespace icnslice::orch {

double
SliceMetrics::cacheHitRatio() const
{
  if (totals.interests_in == 0) {
    return 0;
  }
  return static_cast<double>(totals.cs_hits) / static_cast<double>(totals.interests_in);
}

nlohmann::json
countersToJson(const core::SliceCounters& c)
{
  return {
    {"interests_in", c.interests_in},
    {"interests_out", c.interests_out},
    {"data_in", c.data_in},
    {"data_out", c.data_out},
    {"cs_hits", c.cs_hits},
    {"pit_aggregations", c.pit_aggregations},
    {"nacks", c.nacks},
    {"drops", c.drops},
    {"timeouts", c.timeouts},
    {"nacks_in", c.nacks_in},
    {"unsolicited", c.unsolicited},
    {"reexpressions", c.reexpressions},
  };
}

nlohmann::json
SliceMetrics::toJson() const
{
  nlohmann::json nodes = nlohmann::json::object();
  for (const auto& [n, c] : per_node) {
    nodes[n] = countersToJson(c);
  }
  return {
    {"slice_id", id.value},
    {"name", name},
    {"totals", countersToJson(totals)},
    {"cache_hit_ratio", cacheHitRatio()},
    {"pit_entries", pit_entries},
    {"cs_bytes", cs_bytes},
    {"per_node", nodes},
  };
}

SliceMetrics
Monitor::collect(SliceId id) const
{
  const auto& rec = m_orch.slice(id);
  SliceMetrics m;
  m.id = id;
  m.name = rec.tmpl.slice_name;
  for (const auto& n : rec.nodes) {
    const auto& fw = m_net.forwarder(n);
    if (!fw.hasSlice(id)) {
      continue;
    }
    const auto& t = fw.tables(id);
    const auto& c = t.counters;
    m.per_node[n] = c;
    auto& s = m.totals;
    s.interests_in += c.interests_in;
    s.interests_out += c.interests_out;
    s.data_in += c.data_in;
    s.data_out += c.data_out;
    s.cs_hits += c.cs_hits;
    s.pit_aggregations += c.pit_aggregations;
    s.nacks += c.nacks;
    s.drops += c.drops;
    s.timeouts += c.timeouts;
    s.nacks_in += c.nacks_in;
    s.unsolicited += c.unsolicited;
    s.reexpressions += c.reexpressions;
    m.pit_entries += t.pit.size();
    m.cs_bytes += t.cs.usedBytes();
  }
  return m;
}

std::vector<SliceMetrics>
Monitor::collectAll() const
{
  std::vector<SliceMetrics> out;
  for (auto id : m_orch.sliceIds()) {
    out.push_back(collect(id));
  }
  return out;
}

void
Monitor::start(double periodMs)
{
  m_running = true;
  ++m_generation;
  tick(periodMs, m_generation);
}

void
Monitor::tick(double periodMs, std::uint64_t generation)
{
  if (!m_running || generation != m_generation) {
    return;
  }
  auto now = m_net.clock().now();
  for (const auto& m : collectAll()) {
    m_net.log().record(now, "monitor",
                       {{"slice", m.id.value},
                        {"interests_in", m.totals.interests_in},
                        {"cs_hits", m.totals.cs_hits},
                        {"pit_entries", m.pit_entries},
                        {"cs_bytes", m.cs_bytes}});
  }
  m_net.clock().scheduleAfter(SimTime::fromMs(periodMs),
                              [this, periodMs, generation] { tick(periodMs, generation); });
}

} // namespace icnslice::orch
