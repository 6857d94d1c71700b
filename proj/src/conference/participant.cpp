#include "icnslice/conference/participant.hpp"
#include "icnslice/conference/conference.hpp"

#include <cmath>

namespace icnslice::conf {

using core::Data;
using core::Interest;
using core::Nack;
using core::Name;

namespace {

constexpr std::size_t SIGNATURE_BYTES = 32;

std::optional<std::int64_t>
toInt(const std::string& text)
{
  try {
    std::size_t used = 0;
    auto v = std::stoll(text, &used);
    if (used != text.size()) {
      return std::nullopt;
    }
    return v;
  }
  catch (const std::exception&) {
    return std::nullopt;
  }
}

} // namespace

Roles
Roles::fromJson(const nlohmann::json& j)
{
  Roles r{false, false};
  for (const auto& item : j) {
    auto s = item.get<std::string>();
    if (s == "producer") {
      r.producer = true;
    }
    else if (s == "consumer") {
      r.consumer = true;
    }
    else {
      throw InvalidParticipant("unknown role '" + s + "'");
    }
  }
  if (!r.producer && !r.consumer) {
    throw InvalidParticipant("a participant needs at least one role");
  }
  return r;
}

nlohmann::json
Roles::toJson() const
{
  nlohmann::json j = nlohmann::json::array();
  if (producer) {
    j.push_back("producer");
  }
  if (consumer) {
    j.push_back("consumer");
  }
  return j;
}

Participant::Participant(Conference& conf, std::string id, Roles roles, std::uint64_t seed)
  : m_conf(conf)
  , m_id(std::move(id))
  , m_roles(roles)
  , m_rng(seed)
{
  m_roster.conference = conf.slice();
}

Name
Participant::prefix() const
{
  return m_conf.prefix().append(m_id);
}

std::uint32_t
Participant::lifetimeFor(int attempt) const
{
  return static_cast<std::uint32_t>(std::llround(m_conf.config().interest_lifetime_ms *
                                                 std::ldexp(1.0, attempt)));
}

void
Participant::after(double ms, std::function<void(Participant&)> fn)
{
  std::weak_ptr<Participant> weak = weak_from_this();
  auto gen = m_generation;
  m_conf.network().clock().scheduleAfter(SimTime::fromMs(ms), [weak, gen, fn = std::move(fn)] {
    auto self = weak.lock();
    if (self && self->m_active && self->m_generation == gen) {
      fn(*self);
    }
  });
}

void
Participant::send(core::Packet packet)
{
  if (!m_att) {
    return;
  }
  if (auto* i = std::get_if<Interest>(&packet); i != nullptr && !i->ingress) {
    i->ingress = orch::Orchestrator::topologicalName(m_att->poa);
  }
  m_conf.network().sendFromApp(m_att->poa, m_att->face, std::move(packet));
}

void
Participant::start()
{
  m_active = true;
  if (m_roles.consumer) {
    sendPoll();
  }
}

void
Participant::stop()
{
  m_active = false;
  ++m_generation;
}

void
Participant::attached(const Attachment& att)
{
  m_att = att;
  ++m_epoch;
  if (!m_active) {
    return;
  }
  if (m_roles.producer) {
    m_syncAttempts = 0;
    sendSyncUpdate();
  }
  if (m_roles.consumer) {
    std::vector<Key> keys;
    for (const auto& [key, _] : m_outstanding) {
      keys.push_back(key);
    }
    for (const auto& key : keys) {
      express(key);
    }
    sendPoll();
  }
}

void
Participant::detached()
{
  m_att.reset();
  for (auto& [_, f] : m_outstanding) {
    f.nonce = 0;
    f.token = 0;
  }
  m_pollNonce = 0;
  ++m_pollToken;
  m_syncNonce = 0;
}

Name
Participant::publish(std::uint32_t payloadBytes)
{
  if (!m_roles.producer) {
    throw NotProducer(m_id + " is not a producer");
  }
  std::int64_t seq = m_nextSeq++;
  Data d;
  d.slice = m_conf.slice();
  d.name = prefix().append("media").append(std::to_string(seq));
  d.payload_len_bytes = payloadBytes;
  d.signature.assign(SIGNATURE_BYTES, 0);
  d.freshness_ms = m_conf.mediaFreshnessMs();
  Name name = d.name;
  m_store.emplace(seq, std::move(d));
  m_conf.network().log().record(m_conf.network().clock().now(), "publish",
                                {{"slice", m_conf.slice().value}, {"participant", m_id},
                                 {"seq", seq}, {"bytes", payloadBytes}});
  m_syncAttempts = 0;
  sendSyncUpdate();
  return name;
}

void
Participant::sendSyncUpdate()
{
  std::int64_t seq = m_nextSeq - 1;
  if (!m_att || !m_active || seq < 0 || seq <= m_syncAcked) {
    return;
  }
  Interest i;
  i.slice = m_conf.slice();
  i.name = m_conf.prefix().append("sync").append("update").append(m_id).append(std::to_string(seq));
  i.nonce = nonce();
  i.lifetime_ms = lifetimeFor(0);
  m_syncNonce = i.nonce;
  auto sent = i.nonce;
  double wait = 2.0 * i.lifetime_ms + 1000;
  send(std::move(i));
  after(wait, [sent] (Participant& self) {
    if (self.m_syncNonce == sent && self.m_syncAttempts < self.m_conf.config().retry_budget) {
      ++self.m_syncAttempts;
      self.sendSyncUpdate();
    }
  });
}

void
Participant::sendPoll()
{
  if (!m_att || !m_active || !m_roles.consumer) {
    return;
  }
  Interest i;
  i.slice = m_conf.slice();
  i.name = m_conf.prefix().append("sync").append("state").append(std::to_string(m_roster.version));
  i.nonce = nonce();
  i.lifetime_ms = lifetimeFor(0);
  m_pollNonce = i.nonce;
  auto token = ++m_pollToken;
  double wait = 2.0 * i.lifetime_ms + 1000;
  ++m_stats.polls;
  send(std::move(i));
  after(wait, [token] (Participant& self) {
    if (self.m_pollToken == token) {
      self.sendPoll();
    }
  });
}

void
Participant::poll(double delayMs)
{
  m_pollNonce = 0;
  auto token = ++m_pollToken;
  after(delayMs, [token] (Participant& self) {
    if (self.m_pollToken == token) {
      self.sendPoll();
    }
  });
}

void
Participant::onRoster(const SyncState& state)
{
  m_roster = state;
  for (auto it = m_cursor.begin(); it != m_cursor.end();) {
    it = state.roster.count(it->first) > 0 ? std::next(it) : m_cursor.erase(it);
  }
  fetchMissing();
}

void
Participant::fetchMissing()
{
  if (!m_roles.consumer) {
    return;
  }
  for (const auto& [q, latest] : m_roster.roster) {
    if (q == m_id) {
      continue;
    }
    auto& cursor = m_cursor[q];
    for (; cursor <= latest; ++cursor) {
      Key key{q, cursor};
      if (m_received.count(key) > 0 || m_outstanding.count(key) > 0) {
        continue;
      }
      m_outstanding[key] = Fetch{0, 0, m_conf.network().clock().now(), 0};
      express(key);
    }
  }
}

void
Participant::express(const Key& key)
{
  auto it = m_outstanding.find(key);
  if (it == m_outstanding.end() || !m_att || !m_active) {
    return;
  }
  Fetch& f = it->second;
  Interest i;
  i.slice = m_conf.slice();
  i.name = m_conf.prefix().append(key.first).append("media").append(std::to_string(key.second));
  i.nonce = nonce();
  i.lifetime_ms = lifetimeFor(f.attempt);
  f.nonce = i.nonce;
  f.token = m_nextToken++;
  auto sent = f.nonce;
  double wait = 2.0 * i.lifetime_ms + 1000;
  send(std::move(i));
  after(wait, [key, sent] (Participant& self) { self.fetchFailed(key, sent, false); });
}

void
Participant::fetchFailed(const Key& key, std::uint64_t sentNonce, bool noRoute)
{
  auto it = m_outstanding.find(key);
  if (it == m_outstanding.end() || sentNonce == 0 || it->second.nonce != sentNonce) {
    return;
  }
  if (m_roster.roster.count(key.first) == 0) {
    m_outstanding.erase(it);
    return;
  }
  Fetch& f = it->second;
  ++f.attempt;
  if (f.attempt > m_conf.config().retry_budget) {
    ++m_stats.abandoned;
    m_outstanding.erase(it);
    return;
  }
  ++m_stats.retries;
  if (noRoute) {
    f.nonce = 0;
    after(m_conf.config().noroute_backoff_ms, [key] (Participant& self) {
      auto again = self.m_outstanding.find(key);
      if (again != self.m_outstanding.end() && again->second.nonce == 0) {
        self.express(key);
      }
    });
    return;
  }
  express(key);
}

void
Participant::onInterest(const Interest& interest)
{
  if (!m_roles.producer || !m_att) {
    return;
  }
  Name base = prefix();
  const auto& n = interest.name;
  if (n.size() != base.size() + 2 || !base.isPrefixOf(n) || n.at(base.size()) != "media") {
    return;
  }
  auto seq = toInt(n.at(base.size() + 1));
  if (!seq) {
    return;
  }
  auto it = m_store.find(*seq);
  if (it == m_store.end()) {
    return;
  }
  ++m_served;
  m_lastServe = m_conf.network().clock().now();
  send(it->second);
  if (m_serveHook) {
    m_serveHook(*this);
  }
}

void
Participant::onData(const Data& data)
{
  const Name& base = m_conf.prefix();
  const auto& n = data.name;
  if (!base.isPrefixOf(n) || n.size() < base.size() + 3) {
    return;
  }
  const std::string& second = n.at(base.size());

  if (second == "sync") {
    const std::string& verb = n.at(base.size() + 1);
    if (verb == "state") {
      SyncState state;
      try {
        state = SyncState::fromJson(
          nlohmann::json::parse(std::string(data.payload.begin(), data.payload.end())));
      }
      catch (const std::exception&) {
        return;
      }
      if (state.version > m_roster.version) {
        onRoster(state);
      }
      sendPoll();
    }
    else if (verb == "update" && n.size() == base.size() + 4) {
      if (auto seq = toInt(n.at(base.size() + 3))) {
        m_syncAcked = std::max(m_syncAcked, *seq);
        if (*seq == m_nextSeq - 1) {
          m_syncNonce = 0;
        }
      }
    }
    return;
  }

  if (n.size() != base.size() + 3 || n.at(base.size() + 1) != "media") {
    return;
  }
  auto seq = toInt(n.at(base.size() + 2));
  if (!seq) {
    return;
  }
  Key key{second, *seq};
  if (!m_received.insert(key).second) {
    return;
  }
  m_receivedOrder.push_back(key);
  ++m_stats.delivered;
  SimTime now = m_conf.network().clock().now();
  double latency = 0;
  if (auto it = m_outstanding.find(key); it != m_outstanding.end()) {
    latency = (now - it->second.first_sent).ms();
    m_outstanding.erase(it);
  }
  m_stats.latency_sum_ms += latency;
  m_conf.network().log().record(now, "deliver",
                                {{"slice", m_conf.slice().value}, {"participant", m_id},
                                 {"producer", key.first}, {"seq", key.second},
                                 {"latency_ms", latency}});
}

void
Participant::onNack(const Nack& nack)
{
  const Name& base = m_conf.prefix();
  const auto& n = nack.name;
  if (!base.isPrefixOf(n) || n.size() < base.size() + 3) {
    return;
  }
  bool noRoute = nack.reason != core::NackReason::Timeout;
  if (n.at(base.size()) == "sync") {
    if (n.at(base.size() + 1) == "state" && nack.nonce == m_pollNonce) {
      poll(noRoute ? m_conf.config().noroute_backoff_ms : 0);
    }
    else if (n.at(base.size() + 1) == "update" && nack.nonce == m_syncNonce) {
      m_syncNonce = 0;
      if (m_syncAttempts < m_conf.config().retry_budget) {
        ++m_syncAttempts;
        after(noRoute ? m_conf.config().noroute_backoff_ms : 0,
              [] (Participant& self) { self.sendSyncUpdate(); });
      }
    }
    return;
  }
  if (n.size() != base.size() + 3 || n.at(base.size() + 1) != "media") {
    return;
  }
  if (auto seq = toInt(n.at(base.size() + 2))) {
    fetchFailed({n.at(base.size()), *seq}, nack.nonce, noRoute);
  }
}

} // namespace icnslice::conf
