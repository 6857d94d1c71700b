#include "icnslice/mobility/mobility.hpp"

namespace icnslice::mob {

using core::Interest;
using core::Name;

namespace {

nlohmann::json
optionalNumber(const std::optional<double>& v)
{
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

NodeId
nodeOfTopoName(const Name& topo)
{
  return topo.size() == 2 && topo.at(0) == "poa" ? topo.at(1) : std::string{};
}

} // namespace

/// Receives control Interests addressed to one PoA.
class MobilityService::Agent : public substrate::Application
{
public:
  Agent(MobilityService& svc, NodeId node)
    : m_svc(svc)
    , m_node(std::move(node))
  {
  }

  void
  onInterest(const Interest& interest) override
  {
    m_svc.onControl(m_node, interest);
  }

private:
  MobilityService& m_svc;
  NodeId m_node;
};

nlohmann::json
PoAState::toJson() const
{
  nlohmann::json slices = nlohmann::json::array();
  for (const auto& [slice, entries] : prefix_map) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& [prefix, e] : entries) {
      list.push_back({{"prefix", prefix.toUri()},
                      {"poa", e.topo.toUri()},
                      {"local_face", e.local_face ? nlohmann::json(e.local_face->value)
                                                  : nlohmann::json(nullptr)},
                      {"epoch", e.epoch}});
    }
    slices.push_back({{"slice_id", slice.value}, {"entries", list}});
  }
  return {{"node_id", node}, {"topo_name", topo_name.toUri()}, {"prefix_map", slices}};
}

std::string
toString(HandoffReport::Status status)
{
  switch (status) {
    case HandoffReport::Status::InProgress:
      return "in_progress";
    case HandoffReport::Status::Completed:
      return "completed";
    case HandoffReport::Status::MobilityDisabled:
      return "mobility_disabled";
  }
  return "unknown";
}

nlohmann::json
HandoffReport::toJson() const
{
  return {
    {"handoff_id", id},
    {"slice_id", slice.value},
    {"participant", participant},
    {"prefix", event.prefix.toUri()},
    {"from", {{"poa", event.from_poa}, {"iface", substrate::toString(event.from_iface)}}},
    {"to", {{"poa", event.to_poa}, {"iface", substrate::toString(event.to_iface)}}},
    {"at_ms", event.at.ms()},
    {"detach_gap_ms", event.detach_gap_ms},
    {"status", toString(status)},
    {"epoch", epoch},
    {"interests_late_bound", interests_late_bound},
    {"interests_lost", interests_lost},
    {"ingress_updates", ingress_updates},
    {"stretch_before", optionalNumber(stretch_before)},
    {"stretch_after", optionalNumber(stretch_after)},
    {"link_stretch_before", optionalNumber(link_stretch_before)},
    {"link_stretch_after", optionalNumber(link_stretch_after)},
    {"interruption_ms", optionalNumber(interruption_ms)},
  };
}

MobilityService::MobilityService(substrate::Network& net, orch::Orchestrator& orch,
                                 std::uint64_t seed, double holdMs)
  : m_net(net)
  , m_orch(orch)
  , m_seed(seed)
  , m_holdMs(holdMs)
{
}

MobilityService::~MobilityService() = default;

void
MobilityService::install()
{
  if (m_installed) {
    return;
  }
  m_installed = true;
  const auto& topo = m_net.topology();
  std::set<NodeId> nodes;
  std::set<LinkId> links;
  for (const auto& [id, _] : topo.nodes()) {
    nodes.insert(id);
    m_net.forwarder(id).provisionSlice(CONTROL_SLICE, 0);
  }
  for (const auto& [id, l] : topo.links()) {
    if (!l.isAccess()) {
      links.insert(id);
    }
  }
  for (const auto& [id, node] : topo.nodes()) {
    if (node.role != substrate::NodeRole::AccessPoa) {
      continue;
    }
    PoAState& st = m_poas[id];
    st.node = id;
    st.topo_name = orch::Orchestrator::topologicalName(id);
    auto agent = std::make_unique<Agent>(*this, id);
    st.agent_face = m_net.attachApp(id, *agent, "mobility-agent");
    m_agents.emplace(id, std::move(agent));
    auto& fwd = m_net.forwarder(id);
    fwd.setTopologicalName(st.topo_name);
    fwd.setResolver([this, id] (SliceId slice, const Interest& i, FaceId in, SimTime now) {
      return resolve(id, slice, i, in, now);
    });

    for (const auto& [n, link] : orch::nextHopsToward(topo, nodes, links, id)) {
      m_net.forwarder(n).fib(CONTROL_SLICE).insert(st.topo_name, {m_net.linkFace(n, link)});
    }
    fwd.fib(CONTROL_SLICE).insert(st.topo_name, {st.agent_face});
  }
  m_net.addExpiryListener([this] (const NodeId& node, const core::ExpiredEntry& e) {
    onExpired(node, e);
  });
}

PoAState&
MobilityService::state(const NodeId& node)
{
  auto it = m_poas.find(node);
  if (it == m_poas.end()) {
    throw std::out_of_range(node + " is not a PoA");
  }
  return it->second;
}

const PoAState&
MobilityService::poa(const NodeId& node) const
{
  auto it = m_poas.find(node);
  if (it == m_poas.end()) {
    throw std::out_of_range(node + " is not a PoA");
  }
  return it->second;
}

std::vector<NodeId>
MobilityService::poaIds() const
{
  std::vector<NodeId> out;
  for (const auto& [id, _] : m_poas) {
    out.push_back(id);
  }
  return out;
}

std::uint64_t
MobilityService::nonce(SliceId slice, const NodeId& node)
{
  auto it = m_rngs.find({slice, node});
  if (it == m_rngs.end()) {
    std::string label = slice == CONTROL_SLICE || !m_orch.hasSlice(slice)
                          ? std::to_string(slice.value)
                          : m_orch.slice(slice).tmpl.slice_name;
    it = m_rngs.emplace(std::pair{slice, node},
                        std::mt19937_64(stableHash("mobility/" + label + "@" + node, m_seed)))
           .first;
  }
  return it->second();
}

HandoffReport*
MobilityService::currentReport(SliceId slice, const Name& prefix)
{
  auto it = m_current.find({slice, prefix});
  if (it == m_current.end()) {
    return nullptr;
  }
  HandoffReport& r = m_reports.at(it->second);
  return r.open ? &r : nullptr;
}

const MapEntry*
MobilityService::lookup(const PoAState& st, SliceId slice, const Name& name, Name* prefix) const
{
  auto it = st.prefix_map.find(slice);
  if (it == st.prefix_map.end()) {
    return nullptr;
  }
  const MapEntry* best = nullptr;
  std::size_t bestLen = 0;
  for (const auto& [p, e] : it->second) {
    if (p.size() > bestLen && p.isPrefixOf(name)) {
      best = &e;
      bestLen = p.size();
      *prefix = p;
    }
  }
  return best;
}

void
MobilityService::setMobility(SliceId slice, bool enabled, conf::Conference& conf)
{
  if (!m_orch.hasSlice(slice)) {
    throw orch::SliceNotFound(slice);
  }
  m_orch.slice(slice);
  if (enabled == this->enabled(slice)) {
    return;
  }
  m_net.log().record(m_net.clock().now(), "mobility",
                     {{"slice", slice.value}, {"enabled", enabled}});
  if (!enabled) {
    // entries stay as they are but are no longer consulted
    m_enabled.erase(slice);
    return;
  }
  m_enabled.insert(slice);
  for (const auto& id : conf.participantIds()) {
    auto& p = conf.participant(id);
    if (!p.roles().producer || !p.attachment()) {
      continue;
    }
    Name prefix = p.prefix();
    const auto& att = *p.attachment();
    for (auto& [node, st] : m_poas) {
      auto sit = st.prefix_map.find(slice);
      if (node == att.poa) {
        st.prefix_map[slice][prefix] = MapEntry{st.topo_name, att.face, p.epoch()};
      }
      else if (sit != st.prefix_map.end() && sit->second.count(prefix) > 0) {
        sit->second[prefix] = MapEntry{orch::Orchestrator::topologicalName(att.poa), std::nullopt,
                                       p.epoch()};
      }
    }
  }
}

void
MobilityService::producerJoined(conf::Conference& conf, conf::Participant& p)
{
  if (!p.roles().producer || !p.attachment()) {
    return;
  }
  std::weak_ptr<conf::Participant> weak = p.weak_from_this();
  SliceId slice = conf.slice();
  Name prefix = p.prefix();
  p.setServeHook([this, slice, prefix] (const conf::Participant& self) {
    HandoffReport* r = currentReport(slice, prefix);
    if (r && !r->interruption_ms && r->attached_at) {
      r->interruption_ms = (m_net.clock().now() - r->event.at).ms();
    }
    (void)self;
  });
  if (!enabled(slice)) {
    return;
  }
  PoAState& st = state(p.attachment()->poa);
  st.prefix_map[slice][prefix] = MapEntry{st.topo_name, p.attachment()->face, p.epoch()};
}

void
MobilityService::forget(SliceId slice, const Name& prefix)
{
  for (auto& [_, st] : m_poas) {
    if (auto it = st.prefix_map.find(slice); it != st.prefix_map.end()) {
      it->second.erase(prefix);
    }
    st.provenance.erase({slice, prefix});
    st.notified.erase({slice, prefix});
    st.detached_at.erase({slice, prefix});
  }
  if (auto* r = currentReport(slice, prefix)) {
    r->open = false;
  }
  m_current.erase({slice, prefix});
}

void
MobilityService::forgetSlice(SliceId slice)
{
  for (auto& [_, st] : m_poas) {
    st.prefix_map.erase(slice);
    std::erase_if(st.provenance, [&] (const auto& kv) { return kv.first.first == slice; });
    std::erase_if(st.notified, [&] (const auto& kv) { return kv.first.first == slice; });
    std::erase_if(st.detached_at, [&] (const auto& kv) { return kv.first.first == slice; });
  }
  for (auto it = m_current.begin(); it != m_current.end();) {
    if (it->first.first == slice) {
      m_reports.at(it->second).open = false;
      it = m_current.erase(it);
    }
    else {
      ++it;
    }
  }
  m_enabled.erase(slice);
}

const HandoffReport&
MobilityService::handoff(conf::Conference& conf, const std::string& pid, const NodeId& toPoa,
                         std::optional<substrate::AccessType> iface, std::optional<double> gapMs)
{
  conf::Participant& p = conf.participant(pid);
  if (!p.roles().producer) {
    throw conf::NotProducer(pid + " is not a producer");
  }
  if (!p.attachment()) {
    throw conf::HandoffInProgress(pid + " is between access links");
  }
  const auto& link = conf.accessLink(toPoa, iface);
  const auto from = *p.attachment();
  if (from.poa == toPoa && from.link == link.id) {
    throw std::invalid_argument(pid + " is already attached at " + toPoa + " over " +
                                substrate::toString(from.iface));
  }

  SliceId slice = conf.slice();
  Name prefix = p.prefix();
  SimTime now = m_net.clock().now();
  double gap = gapMs.value_or(defaultGapMs);
  if (gap < 0) {
    throw std::invalid_argument("detach gap must be non-negative");
  }
  bool on = enabled(slice);

  HandoffReport r;
  r.id = m_reports.size() + 1;
  r.slice = slice;
  r.participant = pid;
  r.event = HandoffEvent{prefix, from.poa, from.iface, toPoa, *link.access_type, now, gap};
  r.status = on ? HandoffReport::Status::InProgress : HandoffReport::Status::MobilityDisabled;
  r.epoch = p.epoch() + 1;
  if (auto* prev = currentReport(slice, prefix)) {
    prev->open = false;
  }
  m_reports.push_back(r);
  std::size_t index = m_reports.size() - 1;
  m_current[{slice, prefix}] = index;

  m_net.log().record(now, "handoff",
                     {{"slice", slice.value}, {"participant", pid}, {"from", from.poa},
                      {"to", toPoa}, {"iface", substrate::toString(*link.access_type)},
                      {"gap_ms", gap}, {"mobility", on}});

  if (on) {
    PoAState& old = state(from.poa);
    old.detached_at[{slice, prefix}] = now;
    if (auto latest = m_net.forwarder(from.poa).holdPending(slice, prefix,
                                                             now + SimTime::fromMs(m_holdMs))) {
      m_net.scheduleSweep(from.poa, slice, *latest);
    }
  }
  conf.disconnect(p);

  std::weak_ptr<conf::Participant> weak = p.weak_from_this();
  auto type = *link.access_type;
  NodeId oldPoa = from.poa;
  m_net.clock().scheduleAfter(SimTime::fromMs(gap), [this, weak, toPoa, type, index, oldPoa] {
    auto self = weak.lock();
    if (!self || self->attachment()) {
      return;
    }
    auto& c = self->conference();
    c.connect(*self, toPoa, type);
    HandoffReport& rep = m_reports.at(index);
    rep.attached_at = m_net.clock().now();
    if (enabled(c.slice())) {
      bindLocal(c, *self, &rep, oldPoa);
    }
  });
  return m_reports.at(index);
}

void
MobilityService::bindLocal(conf::Conference& conf, conf::Participant& p, HandoffReport* report,
                           const NodeId& oldPoa)
{
  const auto& att = *p.attachment();
  SliceId slice = conf.slice();
  Name prefix = p.prefix();
  PoAState& st = state(att.poa);
  std::pair key{slice, prefix};
  st.prefix_map[slice][prefix] = MapEntry{st.topo_name, att.face, p.epoch()};
  st.detached_at.erase(key);
  st.provenance.erase(key);
  st.notified.erase(key);
  m_orch.setLocalRoute(slice, att.poa, prefix, att.face);
  SimTime now = m_net.clock().now();
  m_net.log().record(now, "prefix_map",
                     {{"slice", slice.value}, {"node", att.poa}, {"prefix", prefix.toUri()},
                      {"poa", st.topo_name.toUri()}, {"epoch", p.epoch()}});

  if (oldPoa == att.poa) {
    auto actions = m_net.forwarder(att.poa).reexpressPending(
      slice, prefix, std::nullopt, [&] { return nonce(slice, att.poa); }, now);
    if (report != nullptr) {
      report->interests_late_bound += actions.out.size();
      report->rebound_at = now;
      report->status = HandoffReport::Status::Completed;
    }
    m_net.dispatch(att.poa, std::move(actions));
    return;
  }
  sendControl(att.poa, oldPoa, "moved", slice, p.epoch(), att.poa, prefix);
}

void
MobilityService::sendControl(const NodeId& from, const NodeId& to, const std::string& verb,
                             SliceId slice, std::uint64_t epoch, const NodeId& newPoa,
                             const Name& prefix)
{
  Interest i;
  i.slice = CONTROL_SLICE;
  i.name = orch::Orchestrator::topologicalName(to)
             .append(verb)
             .append(std::to_string(slice.value))
             .append(std::to_string(epoch))
             .append(newPoa)
             .append(prefix);
  i.nonce = nonce(slice, from);
  m_net.sendFromApp(from, state(from).agent_face, std::move(i));
}

void
MobilityService::onControl(const NodeId& node, const Interest& interest)
{
  const auto& n = interest.name;
  // /poa/<node>/<verb>/<slice>/<epoch>/<newpoa>/<prefix...>
  if (n.size() < 7) {
    return;
  }
  SliceId slice;
  std::uint64_t epoch = 0;
  try {
    slice = SliceId{static_cast<std::uint32_t>(std::stoul(n.at(3)))};
    epoch = std::stoull(n.at(4));
  }
  catch (const std::exception&) {
    return;
  }
  const NodeId& newPoa = n.at(5);
  std::vector<std::string> comps(n.components().begin() + 6, n.components().end());
  Name prefix(comps);

  core::Data ack;
  ack.slice = CONTROL_SLICE;
  ack.name = n;
  ack.freshness_ms = 0;
  m_net.sendFromApp(node, state(node).agent_face, std::move(ack));

  if (!enabled(slice) || !m_orch.hasSlice(slice)) {
    return;
  }
  if (n.at(2) == "moved") {
    onMoved(node, slice, epoch, newPoa, prefix);
  }
  else if (n.at(2) == "mapping") {
    onMapping(node, slice, epoch, newPoa, prefix);
  }
}

void
MobilityService::onMoved(const NodeId& node, SliceId slice, std::uint64_t epoch,
                         const NodeId& newPoa, const Name& prefix)
{
  PoAState& st = state(node);
  std::pair key{slice, prefix};
  MapEntry& e = st.prefix_map[slice][prefix];
  SimTime now = m_net.clock().now();
  if (e.epoch >= epoch) {
    m_net.log().record(now, "stale_update",
                       {{"slice", slice.value}, {"node", node}, {"prefix", prefix.toUri()},
                        {"epoch", epoch}, {"current", e.epoch}});
    return;
  }
  Name target = orch::Orchestrator::topologicalName(newPoa);
  e = MapEntry{target, std::nullopt, epoch};
  st.detached_at.erase(key);
  const auto& rec = m_orch.slice(slice);
  if (rec.local_routes.count({node, prefix}) > 0) {
    m_orch.setLocalRoute(slice, node, prefix, std::nullopt);
  }

  auto actions = m_net.forwarder(node).reexpressPending(
    slice, prefix, target, [&] { return nonce(slice, node); }, now);
  std::size_t rebound = actions.out.size();
  HandoffReport* report = currentReport(slice, prefix);
  if (report != nullptr) {
    report->interests_late_bound += rebound;
    report->rebound_at = now;
    report->status = HandoffReport::Status::Completed;
  }
  m_net.dispatch(node, std::move(actions));
  m_net.log().record(now, "late_bind",
                     {{"slice", slice.value}, {"node", node}, {"prefix", prefix.toUri()},
                      {"to", newPoa}, {"epoch", epoch}, {"reexpressed", rebound}});

  std::set<NodeId> ingresses = std::move(st.provenance[key]);
  st.provenance.erase(key);
  auto& sent = st.notified[key];
  sent.clear();
  for (const auto& ingress : ingresses) {
    if (ingress == node || ingress == newPoa) {
      continue;
    }
    sendControl(node, ingress, "mapping", slice, epoch, newPoa, prefix);
    sent.insert(ingress);
    if (report != nullptr) {
      ++report->ingress_updates;
    }
  }
}

void
MobilityService::onMapping(const NodeId& node, SliceId slice, std::uint64_t epoch,
                           const NodeId& newPoa, const Name& prefix)
{
  if (node == newPoa) {
    return;
  }
  PoAState& st = state(node);
  MapEntry& e = st.prefix_map[slice][prefix];
  SimTime now = m_net.clock().now();
  if (e.epoch >= epoch) {
    m_net.log().record(now, "stale_update",
                       {{"slice", slice.value}, {"node", node}, {"prefix", prefix.toUri()},
                        {"epoch", epoch}, {"current", e.epoch}});
    return;
  }
  e = MapEntry{orch::Orchestrator::topologicalName(newPoa), std::nullopt, epoch};
  m_net.log().record(now, "mapping_update",
                     {{"slice", slice.value}, {"node", node}, {"prefix", prefix.toUri()},
                      {"to", newPoa}, {"epoch", epoch}});
}

core::InterestDecision
MobilityService::resolve(const NodeId& node, SliceId slice, const Interest& interest,
                         FaceId inFace, SimTime now)
{
  if (slice == CONTROL_SLICE || !enabled(slice)) {
    return {};
  }
  PoAState& st = state(node);
  Name prefix{"_"};
  const MapEntry* e = lookup(st, slice, interest.name, &prefix);
  if (e == nullptr) {
    return {};
  }
  std::pair key{slice, prefix};
  NodeId ingress = interest.ingress ? nodeOfTopoName(*interest.ingress) : NodeId{};

  if (e->topo == st.topo_name) {
    if (!ingress.empty() && ingress != node) {
      st.provenance[key].insert(ingress);
    }
    bool up = e->local_face && m_net.faceInfo(node, *e->local_face).up;
    if (up) {
      if (!ingress.empty()) {
        const auto& topo = m_net.topology();
        int hops = topo.hopDistance(ingress, node);
        std::set<NodeId> distinct(interest.trace.begin(), interest.trace.end());
        StretchSample s;
        s.at = now;
        s.slice = slice;
        s.prefix = prefix;
        s.poa = node;
        s.ingress = ingress;
        s.ratio = static_cast<double>(distinct.size()) / (hops + 1);
        s.link_ratio = hops > 0 ? static_cast<double>(interest.trace.size() - 1) / hops : 1.0;
        m_samples.push_back(s);
        if (HandoffReport* r = currentReport(slice, prefix);
            r != nullptr && r->event.to_poa == node &&
            r->status != HandoffReport::Status::MobilityDisabled) {
          if (!r->stretch_before) {
            r->stretch_before = s.ratio;
            r->link_stretch_before = s.link_ratio;
          }
          r->stretch_after = s.ratio;
          r->link_stretch_after = s.link_ratio;
        }
        auto last = m_lastLoggedStretch.find(key);
        if (last == m_lastLoggedStretch.end() || last->second != s.ratio) {
          m_lastLoggedStretch[key] = s.ratio;
          m_net.log().record(now, "stretch",
                             {{"slice", slice.value}, {"node", node}, {"prefix", prefix.toUri()},
                              {"ingress", ingress}, {"ratio", s.ratio},
                              {"link_ratio", s.link_ratio}});
        }
      }
      return {};
    }
    auto since = st.detached_at.find(key);
    SimTime base = since != st.detached_at.end() ? since->second : now;
    return {std::nullopt, std::max(now + SimTime::fromMs(interest.lifetime_ms),
                                   base + SimTime::fromMs(m_holdMs))};
  }

  if (interest.forwarding_hint) {
    return {};
  }
  if (!m_net.faceInfo(node, inFace).isApp) {
    HandoffReport* r = currentReport(slice, prefix);
    if (r != nullptr) {
      ++r->interests_late_bound;
    }
    NodeId target = nodeOfTopoName(e->topo);
    auto& sent = st.notified[key];
    if (!ingress.empty() && ingress != node && ingress != target && sent.count(ingress) == 0) {
      sent.insert(ingress);
      sendControl(node, ingress, "mapping", slice, e->epoch, target, prefix);
      if (r != nullptr) {
        ++r->ingress_updates;
      }
    }
  }
  return {e->topo, std::nullopt};
}

void
MobilityService::onExpired(const NodeId& node, const core::ExpiredEntry& e)
{
  if (e.slice == CONTROL_SLICE) {
    return;
  }
  for (const auto& [key, index] : m_current) {
    if (key.first != e.slice || !key.second.isPrefixOf(e.name)) {
      continue;
    }
    HandoffReport& r = m_reports.at(index);
    if (r.open && r.event.from_poa == node) {
      ++r.interests_lost;
    }
  }
}

} // namespace icnslice::mob
