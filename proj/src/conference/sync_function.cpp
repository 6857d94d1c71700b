#include "icnslice/conference/sync_function.hpp"
#include "icnslice/conference/conference.hpp"

namespace icnslice::conf {

nlohmann::json
SyncState::toJson() const
{
  nlohmann::json r = nlohmann::json::object();
  for (const auto& [p, seq] : roster) {
    r[p] = seq;
  }
  return {{"version", version}, {"roster", r}};
}

SyncState
SyncState::fromJson(const nlohmann::json& j)
{
  SyncState s;
  s.version = j.at("version").get<std::uint64_t>();
  for (const auto& [p, seq] : j.at("roster").items()) {
    s.roster[p] = seq.get<std::int64_t>();
  }
  return s;
}

SyncFunction::SyncFunction(Conference& conf)
  : m_conf(conf)
{
  m_state.conference = conf.slice();
}

void
SyncFunction::attach(const NodeId& node, FaceId face)
{
  m_node = node;
  m_face = face;
}

void
SyncFunction::detach()
{
  m_node.reset();
  m_pending.clear();
}

void
SyncFunction::addParticipant(const std::string& id)
{
  m_state.roster.emplace(id, -1);
  changed();
}

void
SyncFunction::removeParticipant(const std::string& id)
{
  if (m_state.roster.erase(id) > 0) {
    changed();
  }
}

bool
SyncFunction::advance(const std::string& id, std::int64_t seq)
{
  auto it = m_state.roster.find(id);
  if (it == m_state.roster.end() || seq <= it->second) {
    return false;
  }
  it->second = seq;
  changed();
  return true;
}

void
SyncFunction::changed()
{
  ++m_state.version;
  answerPending();
}

void
SyncFunction::onInterest(const core::Interest& interest)
{
  const auto& n = interest.name;
  const auto& base = m_conf.prefix();
  if (n.size() < base.size() + 2 || !base.isPrefixOf(n) || n.at(base.size()) != "sync") {
    return;
  }
  const std::string& verb = n.at(base.size() + 1);
  SimTime now = m_conf.network().clock().now();

  if (verb == "state" && n.size() == base.size() + 3) {
    std::uint64_t known = 0;
    try {
      known = std::stoull(n.at(base.size() + 2));
    }
    catch (const std::exception&) {
      return;
    }
    if (m_state.version > known) {
      reply(n, m_state.toJson().dump());
      return;
    }
    m_pending.push_back({n, known, now + SimTime::fromMs(interest.lifetime_ms)});
    return;
  }

  if (verb == "update" && n.size() == base.size() + 4) {
    std::int64_t seq = 0;
    try {
      seq = std::stoll(n.at(base.size() + 3));
    }
    catch (const std::exception&) {
      return;
    }
    advance(n.at(base.size() + 2), seq);
    reply(n, "ok");
  }
}

void
SyncFunction::answerPending()
{
  if (!m_node) {
    return;
  }
  SimTime now = m_conf.network().clock().now();
  std::vector<Pending> keep;
  std::set<core::Name> answered;
  for (auto& p : m_pending) {
    if (p.expires <= now) {
      continue;
    }
    if (m_state.version > p.known) {
      if (answered.insert(p.name).second) {
        reply(p.name, m_state.toJson().dump());
      }
      continue;
    }
    keep.push_back(std::move(p));
  }
  m_pending = std::move(keep);
}

void
SyncFunction::reply(const core::Name& name, std::string body)
{
  if (!m_node) {
    return;
  }
  core::Data d;
  d.slice = m_conf.slice();
  d.name = name;
  d.payload.assign(body.begin(), body.end());
  d.payload_len_bytes = static_cast<std::uint32_t>(d.payload.size());
  // roster answers go stale at the next change, so they are never cached
  d.freshness_ms = 0;
  m_conf.network().sendFromApp(*m_node, m_face, std::move(d));
}

} // namespace icnslice::conf
