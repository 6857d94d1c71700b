#include "icnslice/api/engine.hpp"

#include <cmath>

namespace icnslice::api {

using nlohmann::json;

namespace {

constexpr std::size_t EVENT_BACKLOG = 10000;

const json&
required(const json& args, const char* key)
{
  if (!args.is_object() || !args.contains(key) || args[key].is_null()) {
    throw ApiError(400, "BadRequest", std::string("missing field '") + key + "'",
                   {{"field", key}});
  }
  return args[key];
}

std::string
requiredString(const json& args, const char* key)
{
  const auto& v = required(args, key);
  if (!v.is_string()) {
    throw ApiError(400, "BadRequest", std::string("field '") + key + "' must be a string",
                   {{"field", key}});
  }
  return v.get<std::string>();
}

double
numberOr(const json& args, const char* key, double fallback)
{
  if (!args.is_object() || !args.contains(key) || args[key].is_null()) {
    return fallback;
  }
  if (!args[key].is_number()) {
    throw ApiError(400, "BadRequest", std::string("field '") + key + "' must be a number",
                   {{"field", key}});
  }
  return args[key].get<double>();
}

std::optional<double>
optionalNumber(const json& args, const char* key)
{
  if (!args.is_object() || !args.contains(key) || args[key].is_null()) {
    return std::nullopt;
  }
  return numberOr(args, key, 0);
}

std::optional<substrate::AccessType>
optionalIface(const json& args)
{
  if (!args.is_object() || !args.contains("iface") || args["iface"].is_null()) {
    return std::nullopt;
  }
  auto text = requiredString(args, "iface");
  auto t = substrate::parseAccessType(text);
  if (!t) {
    throw ApiError(400, "BadRequest", "unknown access type '" + text + "'", {{"field", "iface"}});
  }
  return t;
}

bool
isQuietKind(std::string_view kind)
{
  return kind == "tx" || kind == "drop" || kind == "deliver" || kind == "publish";
}

} // namespace

Engine::Engine(substrate::Topology topo, EngineOptions options)
  : m_topo(std::move(topo))
  , m_options(options)
  , m_clock(options.seed)
  , m_net(m_topo, m_clock, m_log)
  , m_ledger(m_topo)
  , m_orch(m_net, m_ledger, options.load, options.cache_enabled)
  , m_monitor(m_net, m_orch)
  , m_mobility(m_net, m_orch, options.seed, 2.0 * options.conference.interest_lifetime_ms)
{
  m_log.setRetain(options.retain_log);
  m_log.addListener([this] (std::string_view kind, const std::string& line) {
    if (isQuietKind(kind)) {
      return;
    }
    m_events.emplace_back(++m_eventSeq, line);
    if (m_events.size() > EVENT_BACKLOG) {
      m_events.pop_front();
    }
  });
  m_mobility.install();
  if (options.monitor_period_ms > 0) {
    m_monitor.start(options.monitor_period_ms);
  }
}

Engine::~Engine()
{
  m_monitor.stop();
  m_conferences.clear();
}

conf::Conference&
Engine::conference(SliceId slice)
{
  auto it = m_conferences.find(slice);
  if (it == m_conferences.end()) {
    throw orch::SliceNotFound(slice);
  }
  return *it->second;
}

SliceId
Engine::resolveSlice(const json& ref) const
{
  if (ref.is_number_unsigned() || ref.is_number_integer()) {
    auto v = ref.get<std::int64_t>();
    if (v <= 0 || !m_orch.hasSlice(SliceId{static_cast<std::uint32_t>(v)})) {
      throw ApiError(404, "UnknownSlice", "unknown slice " + std::to_string(v));
    }
    return SliceId{static_cast<std::uint32_t>(v)};
  }
  if (ref.is_string()) {
    const auto& text = ref.get_ref<const std::string&>();
    if (auto id = m_orch.findByName(text)) {
      return *id;
    }
    if (!text.empty() && text.find_first_not_of("0123456789") == std::string::npos) {
      return resolveSlice(json(std::stoll(text)));
    }
    throw ApiError(404, "UnknownSlice", "unknown slice '" + text + "'");
  }
  throw ApiError(400, "BadRequest", "slice must be an id or a name", {{"field", "slice"}});
}

std::pair<conf::Conference*, std::string>
Engine::participantRef(const json& args)
{
  auto pid = requiredString(args, "participant");
  if (args.contains("slice") && !args["slice"].is_null()) {
    auto& c = conference(resolveSlice(args["slice"]));
    c.participant(pid);
    return {&c, pid};
  }
  conf::Conference* found = nullptr;
  for (auto& [_, c] : m_conferences) {
    if (c->has(pid)) {
      if (found != nullptr) {
        throw ApiError(400, "AmbiguousParticipant",
                       pid + " is in several slices; name the slice", {{"field", "slice"}});
      }
      found = c.get();
    }
  }
  if (found == nullptr) {
    throw conf::UnknownParticipant(pid + " has not joined any slice");
  }
  return {found, pid};
}

json
Engine::execute(const std::string& command, const json& args)
{
  if (command == "create_slice") {
    const json& doc = args.contains("template") ? args["template"] : args;
    auto tmpl = orch::SliceTemplate::fromJson(doc);
    SliceId id = m_orch.createSlice(tmpl);
    try {
      auto c = std::make_unique<conf::Conference>(m_net, m_orch, id, m_options.seed,
                                                  m_options.conference);
      c->start();
      m_conferences.emplace(id, std::move(c));
      if (tmpl.mobility_enabled) {
        m_mobility.setMobility(id, true, *m_conferences.at(id));
      }
    }
    catch (...) {
      m_conferences.erase(id);
      m_orch.teardown(id);
      throw;
    }
    return {{"slice_id", id.value}, {"name", tmpl.slice_name}};
  }

  if (command == "delete_slice") {
    SliceId id = resolveSlice(required(args, "slice"));
    m_conferences.erase(id);
    m_mobility.forgetSlice(id);
    return m_orch.teardown(id).toJson();
  }

  if (command == "set_mobility") {
    SliceId id = resolveSlice(required(args, "slice"));
    const auto& flag = required(args, "enabled");
    if (!flag.is_boolean()) {
      throw ApiError(400, "BadRequest", "field 'enabled' must be a boolean", {{"field", "enabled"}});
    }
    m_mobility.setMobility(id, flag.get<bool>(), conference(id));
    return {{"slice_id", id.value}, {"mobility_enabled", m_mobility.enabled(id)}};
  }

  if (command == "join") {
    SliceId id = resolveSlice(required(args, "slice"));
    auto& c = conference(id);
    conf::Roles roles;
    if (args.contains("roles")) {
      roles = conf::Roles::fromJson(args["roles"]);
    }
    auto& p = c.join(requiredString(args, "participant"), requiredString(args, "poa"), roles,
                     optionalIface(args));
    m_mobility.producerJoined(c, p);
    return {{"slice_id", id.value}, {"participant", p.id()}, {"poa", p.attachment()->poa},
            {"iface", substrate::toString(p.attachment()->iface)},
            {"roster_version", c.sync().state().version}};
  }

  if (command == "leave") {
    SliceId id = resolveSlice(required(args, "slice"));
    auto& c = conference(id);
    auto pid = requiredString(args, "participant");
    core::Name prefix = c.participant(pid).prefix();
    c.leave(pid);
    m_mobility.forget(id, prefix);
    return {{"slice_id", id.value}, {"participant", pid}};
  }

  if (command == "publish") {
    auto [c, pid] = participantRef(args);
    double bytes = numberOr(args, "bytes", 1000);
    double count = numberOr(args, "count", 1);
    double interval = numberOr(args, "interval_ms", 0);
    if (bytes < 0 || count < 1 || interval < 0) {
      throw ApiError(400, "BadRequest", "bytes, count and interval_ms must be non-negative");
    }
    auto b = static_cast<std::uint32_t>(bytes);
    if (count == 1) {
      auto name = c->publish(pid, b);
      return {{"slice_id", c->slice().value}, {"participant", pid}, {"name", name.toUri()}};
    }
    c->stream(pid, b, static_cast<int>(count), interval);
    return {{"slice_id", c->slice().value}, {"participant", pid}, {"count", count}};
  }

  if (command == "handoff") {
    auto [c, pid] = participantRef(args);
    const auto& report = m_mobility.handoff(*c, pid, requiredString(args, "to_poa"),
                                            optionalIface(args), optionalNumber(args, "gap_ms"));
    if (report.status == mob::HandoffReport::Status::MobilityDisabled) {
      throw ApiError(409, "MobilityDisabled",
                     "mobility is off for slice " + std::to_string(c->slice().value) +
                     "; the producer moved unassisted",
                     report.toJson());
    }
    return report.toJson();
  }

  if (command == "move") {
    auto [c, pid] = participantRef(args);
    c->moveConsumer(pid, requiredString(args, "to_poa"), optionalIface(args),
                    optionalNumber(args, "gap_ms"));
    return {{"slice_id", c->slice().value}, {"participant", pid}};
  }

  if (command == "adapt") {
    SliceId id = resolveSlice(required(args, "slice"));
    const auto& counts = required(args, "participants");
    if (!counts.is_array()) {
      throw ApiError(400, "BadRequest", "participants must be an array of counts",
                     {{"field", "participants"}});
    }
    auto report = m_orch.adapt(id, counts.get<std::vector<int>>());
    if (report.status == orch::AdaptReport::Status::Rejected) {
      throw ApiError(409, "AdaptRejected", report.reason, report.toJson());
    }
    return report.toJson();
  }

  if (command == "stop") {
    m_stopAt = m_clock.now();
    return {{"stopped_at_ms", m_clock.now().ms()}};
  }

  throw ApiError(400, "UnknownCommand", "unknown command '" + command + "'");
}

CommandResult
Engine::executeLogged(const std::string& command, const json& args)
{
  CommandResult result;
  json rec{{"command", command}};
  try {
    result.body = execute(command, args);
    result.status = command == "create_slice" ? 201 : 200;
    if (result.body.is_object() && result.body.contains("slice_id")) {
      rec["slice"] = result.body["slice_id"];
    }
  }
  catch (...) {
    ApiError e = classify(std::current_exception());
    result.status = e.status();
    result.body = e.toJson();
    rec["error"] = e.code();
    rec["message"] = e.what();
    if (e.detail().is_object() && e.detail().contains("slice_id")) {
      rec["slice"] = e.detail()["slice_id"];
    }
  }
  if (!rec.contains("slice") && args.is_object() && args.contains("slice")) {
    try {
      rec["slice"] = resolveSlice(args["slice"]).value;
    }
    catch (const std::exception&) {
    }
  }
  rec["status"] = result.status;
  m_log.record(m_clock.now(), "command", std::move(rec));
  return result;
}

CommandResult
Engine::submit(const std::string& command, const json& args)
{
  CommandResult result;
  bool done = false;
  m_clock.schedule(m_clock.now() + SimTime::tick(), [&] {
    result = executeLogged(command, args);
    done = true;
  });
  while (!done) {
    m_clock.step();
  }
  return result;
}

void
Engine::schedule(SimTime at, const std::string& command, json args)
{
  m_clock.schedule(at, [this, command, args = std::move(args)] {
    if (m_stopAt) {
      return;
    }
    executeLogged(command, args);
  });
}

json
Engine::runScript(const ScenarioScript& script)
{
  SimTime horizon = m_clock.now();
  std::optional<SimTime> stop;
  for (const auto& cmd : script.commands) {
    SimTime at = SimTime::fromMs(cmd.at_ms);
    if (at < m_clock.now()) {
      throw ScriptError(cmd.line, "at_ms lies in the past");
    }
    if (cmd.command == "stop") {
      stop = stop ? std::min(*stop, at) : at;
    }
    schedule(at, cmd.command, cmd.args);
    horizon = std::max(horizon, at);
  }
  if (stop) {
    horizon = *stop;
  }
  else if (!script.commands.empty()) {
    horizon = horizon + SimTime::fromMs(m_options.settle_ms);
  }
  runUntil(horizon);
  return metrics();
}

void
Engine::runUntil(SimTime t)
{
  m_clock.runUntil(t);
}

json
Engine::sliceView(SliceId id) const
{
  const auto& rec = m_orch.slice(id);
  json vnodes = json::array();
  for (const auto& v : rec.graph.vnodes) {
    json j{{"vnode_id", v.vnode_id},
           {"kind", orch::toString(v.kind)},
           {"node", rec.alloc.node_map.count(v.vnode_id) ? json(rec.alloc.node_map.at(v.vnode_id))
                                                         : json(nullptr)},
           {"compute_units", v.compute_units},
           {"cache_mb", v.cache_mb}};
    if (v.site_id) {
      j["site_id"] = *v.site_id;
    }
    vnodes.push_back(std::move(j));
  }
  json vlinks = json::array();
  for (const auto& l : rec.graph.vlinks) {
    vlinks.push_back({{"vlink_id", l.vlink_id},
                      {"a", l.a},
                      {"b", l.b},
                      {"bandwidth_mbps", l.bandwidth_mbps},
                      {"latency_budget_ms", l.latency_budget_ms},
                      {"path", rec.alloc.link_map.count(l.vlink_id)
                                 ? json(rec.alloc.link_map.at(l.vlink_id))
                                 : json::array()}});
  }
  json participants = json::array();
  json sync = nullptr;
  if (auto it = m_conferences.find(id); it != m_conferences.end()) {
    const auto& c = *it->second;
    for (const auto& pid : c.participantIds()) {
      const auto& p = c.participant(pid);
      json pj{{"participant_id", pid},
              {"roles", p.roles().toJson()},
              {"attached", p.attachment().has_value()},
              {"poa", p.attachment() ? json(p.attachment()->poa) : json(nullptr)},
              {"iface", p.attachment() ? json(substrate::toString(p.attachment()->iface))
                                       : json(nullptr)},
              {"next_seq", p.nextSeq()},
              {"epoch", p.epoch()}};
      participants.push_back(std::move(pj));
    }
    sync = c.sync().state().toJson();
    sync["node"] = c.sync().node() ? json(*c.sync().node()) : json(nullptr);
  }
  return {{"slice_id", id.value},
          {"name", rec.tmpl.slice_name},
          {"mobility_enabled", m_mobility.enabled(id)},
          {"template", rec.tmpl.toJson()},
          {"vnodes", vnodes},
          {"vlinks", vlinks},
          {"forwarders", rec.nodes},
          {"links", rec.links},
          {"participants", participants},
          {"sync", sync}};
}

json
Engine::forwarderView(const NodeId& node) const
{
  const auto& fwd = m_net.forwarder(node);
  json slices = json::array();
  for (auto slice : fwd.slices()) {
    const auto& t = fwd.tables(slice);
    json fib = json::array();
    for (const auto& e : t.fib.entries()) {
      json hops = json::array();
      for (auto f : e.nexthops) {
        hops.push_back(m_net.faceLabel(node, f));
      }
      fib.push_back({{"prefix", e.prefix.toUri()}, {"nexthops", hops}});
    }
    slices.push_back({{"slice_id", slice.value},
                      {"pit_size", t.pit.size()},
                      {"cs_entries", t.cs.size()},
                      {"cs_bytes", t.cs.usedBytes()},
                      {"fib", fib},
                      {"counters", orch::countersToJson(t.counters)},
                      {"conserved", t.counters.conserved()}});
  }
  return {{"node_id", node},
          {"role", substrate::toString(m_topo.node(node).role)},
          {"slices", slices}};
}

json
Engine::views() const
{
  json slices = json::array();
  for (auto id : m_orch.sliceIds()) {
    slices.push_back(sliceView(id));
  }
  json forwarders = json::array();
  for (const auto& [id, _] : m_topo.nodes()) {
    forwarders.push_back(forwarderView(id));
  }
  json poas = json::array();
  for (const auto& id : m_mobility.poaIds()) {
    poas.push_back(m_mobility.poa(id).toJson());
  }
  return {{"schema_version", SCHEMA_VERSION},
          {"t_ms", m_clock.now().ms()},
          {"slices", slices},
          {"forwarders", forwarders},
          {"poas", poas},
          {"metrics", metrics()}};
}

json
Engine::metrics() const
{
  json slices = json::array();
  for (auto id : m_orch.sliceIds()) {
    auto m = m_monitor.collect(id);
    std::uint64_t delivered = 0;
    double latency = 0;
    std::uint64_t published = 0;
    std::uint64_t served = 0;
    std::uint64_t retries = 0;
    std::uint64_t abandoned = 0;
    if (auto it = m_conferences.find(id); it != m_conferences.end()) {
      for (const auto& pid : it->second->participantIds()) {
        const auto& p = it->second->participant(pid);
        delivered += p.stats().delivered;
        latency += p.stats().latency_sum_ms;
        published += static_cast<std::uint64_t>(p.nextSeq());
        served += p.served();
        retries += p.stats().retries;
        abandoned += p.stats().abandoned;
      }
    }
    json handoffs = json::array();
    for (const auto& r : m_mobility.reports()) {
      if (r.slice == id) {
        handoffs.push_back(r.toJson());
      }
    }
    json stretch = json::array();
    for (const auto& s : m_mobility.stretchSamples()) {
      if (s.slice == id) {
        stretch.push_back({{"t_ms", s.at.ms()}, {"prefix", s.prefix.toUri()}, {"poa", s.poa},
                           {"ingress", s.ingress}, {"ratio", s.ratio},
                           {"link_ratio", s.link_ratio}});
      }
    }
    if (stretch.size() > 200) {
      stretch.erase(stretch.begin(), stretch.end() - 200);
    }
    bool conserved = true;
    for (const auto& [_, c] : m.per_node) {
      conserved = conserved && c.conserved();
    }
    slices.push_back({{"slice_id", id.value},
                      {"name", m.name},
                      {"delivered_segments", delivered},
                      {"mean_delivery_latency_ms",
                       delivered > 0 ? json(latency / static_cast<double>(delivered)) : json(nullptr)},
                      {"published_segments", published},
                      {"producer_serves", served},
                      {"retries", retries},
                      {"abandoned", abandoned},
                      {"cache_hit_ratio", m.cacheHitRatio()},
                      {"pit_entries", m.pit_entries},
                      {"cs_bytes", m.cs_bytes},
                      {"counters", orch::countersToJson(m.totals)},
                      {"conserved", conserved},
                      {"handoffs", handoffs},
                      {"stretch", stretch}});
  }

  json ledger = json::array();
  for (const auto& [key, used] : m_ledger.snapshot()) {
    ledger.push_back({{"kind", substrate::toString(key.kind)},
                      {"id", key.id},
                      {"used", used},
                      {"capacity", m_ledger.capacity(key)}});
  }
  return {{"schema_version", SCHEMA_VERSION},
          {"t_ms", m_clock.now().ms()},
          {"slices", slices},
          {"ledger", ledger},
          {"events_dispatched", m_clock.dispatched()}};
}

json
Engine::eventsSince(std::uint64_t since, std::size_t limit) const
{
  json events = json::array();
  for (const auto& [seq, line] : m_events) {
    if (seq <= since) {
      continue;
    }
    if (events.size() >= limit) {
      break;
    }
    json rec = json::parse(line);
    rec["seq"] = seq;
    events.push_back(std::move(rec));
  }
  std::uint64_t next = events.empty() ? since : events.back()["seq"].get<std::uint64_t>();
  return {{"schema_version", SCHEMA_VERSION}, {"next", next}, {"events", events}};
}

} // namespace icnslice::api
