#include "icnslice/conference/conference.hpp"

#include <cmath>

namespace icnslice::conf {

Conference::Conference(substrate::Network& net, orch::Orchestrator& orch, SliceId slice,
                       std::uint64_t seed, ConferenceConfig config)
  : m_net(net)
  , m_orch(orch)
  , m_slice(slice)
  , m_name(orch.slice(slice).tmpl.slice_name)
  , m_prefix(orch::Orchestrator::slicePrefix(m_name))
  , m_seed(seed)
  , m_config(config)
  , m_sync(std::make_shared<SyncFunction>(*this))
{
}

Conference::~Conference()
{
  shutdown();
}

std::uint32_t
Conference::mediaFreshnessMs() const
{
  return static_cast<std::uint32_t>(std::llround(m_orch.slice(m_slice).tmpl.cache_window_s * 1000));
}

void
Conference::start()
{
  const auto& rec = m_orch.slice(m_slice);
  const NodeId& node = rec.alloc.node_map.at(orch::SYNC_VNODE_ID);
  FaceId face = m_net.attachApp(node, *m_sync, m_name + "/sync");
  m_sync->attach(node, face);
  m_orch.installRoute(m_slice, m_prefix.append("sync"), node, face);
}

void
Conference::shutdown()
{
  for (auto& [_, p] : m_participants) {
    p->stop();
    if (p->attachment()) {
      disconnect(*p);
    }
  }
  m_participants.clear();
  if (m_sync->node()) {
    m_net.detachApp(*m_sync->node(), m_sync->face());
    m_sync->detach();
  }
}

const substrate::PhysLink&
Conference::accessLink(const NodeId& poa, std::optional<substrate::AccessType> iface) const
{
  const auto& topo = m_net.topology();
  if (!topo.hasNode(poa) || topo.node(poa).role != substrate::NodeRole::AccessPoa) {
    throw NoSuchInterface(poa + " is not an access PoA");
  }
  if (iface) {
    const auto* link = topo.accessLink(poa, *iface);
    if (link == nullptr) {
      throw NoSuchInterface(poa + " has no " + substrate::toString(*iface) + " access link");
    }
    return *link;
  }
  auto links = topo.accessLinks(poa);
  if (links.empty()) {
    throw NoSuchInterface(poa + " has no access links");
  }
  return *links.front();
}

Attachment
Conference::connect(Participant& p, const NodeId& poa, std::optional<substrate::AccessType> iface)
{
  const auto& link = accessLink(poa, iface);
  Attachment att;
  att.poa = poa;
  att.iface = *link.access_type;
  att.link = link.id;
  att.face = m_net.attachApp(poa, p, m_name + "/" + p.id(),
                             substrate::ChannelParams{link.latency_ms, link.bandwidth_mbps},
                             link.id);
  m_net.log().record(m_net.clock().now(), "attach",
                     {{"slice", m_slice.value}, {"participant", p.id()}, {"poa", poa},
                      {"iface", substrate::toString(att.iface)}, {"epoch", p.epoch() + 1}});
  p.attached(att);
  return att;
}

void
Conference::disconnect(Participant& p)
{
  const auto& att = p.attachment();
  if (!att) {
    return;
  }
  m_net.detachApp(att->poa, att->face);
  m_net.log().record(m_net.clock().now(), "detach",
                     {{"slice", m_slice.value}, {"participant", p.id()}, {"poa", att->poa}});
  p.detached();
}

Participant&
Conference::join(const std::string& id, const NodeId& poa, Roles roles,
                 std::optional<substrate::AccessType> iface)
{
  if (m_participants.count(id) > 0) {
    throw DuplicateParticipant(id + " already joined " + m_name);
  }
  if (id.empty() || id == "sync" || id.find('/') != std::string::npos) {
    throw InvalidParticipant("participant id '" + id + "' is not usable as a name component");
  }
  accessLink(poa, iface);
  auto p = std::make_shared<Participant>(*this, id, roles,
                                         stableHash(m_name + "/" + id, m_seed));
  m_participants.emplace(id, p);
  m_net.log().record(m_net.clock().now(), "join",
                     {{"slice", m_slice.value}, {"participant", id}, {"poa", poa},
                      {"roles", roles.toJson()}});
  Attachment att = connect(*p, poa, iface);
  m_orch.installRoute(m_slice, p->prefix(), poa, att.face);
  m_sync->addParticipant(id);
  p->start();
  return *p;
}

void
Conference::leave(const std::string& id)
{
  auto it = m_participants.find(id);
  if (it == m_participants.end()) {
    throw UnknownParticipant(id + " is not in " + m_name);
  }
  auto p = it->second;
  p->stop();
  disconnect(*p);
  m_orch.withdrawRoute(m_slice, p->prefix());
  m_sync->removeParticipant(id);
  m_participants.erase(it);
  m_net.log().record(m_net.clock().now(), "leave", {{"slice", m_slice.value}, {"participant", id}});
}

core::Name
Conference::publish(const std::string& id, std::uint32_t payloadBytes)
{
  return participant(id).publish(payloadBytes);
}

void
Conference::stream(const std::string& id, std::uint32_t payloadBytes, int count, double intervalMs)
{
  std::weak_ptr<Participant> weak = m_participants.at(id);
  if (!participant(id).roles().producer) {
    throw NotProducer(id + " is not a producer");
  }
  for (int k = 0; k < count; ++k) {
    m_net.clock().scheduleAfter(SimTime::fromMs(k * intervalMs), [weak, payloadBytes] {
      if (auto p = weak.lock()) {
        p->publish(payloadBytes);
      }
    });
  }
}

void
Conference::moveConsumer(const std::string& id, const NodeId& poa,
                         std::optional<substrate::AccessType> iface, std::optional<double> gapMs)
{
  Participant& p = participant(id);
  const auto& link = accessLink(poa, iface);
  if (!p.attachment()) {
    throw HandoffInProgress(id + " is between access links");
  }
  if (p.attachment()->poa == poa && p.attachment()->link == link.id) {
    return;
  }
  m_net.log().record(m_net.clock().now(), "move",
                     {{"slice", m_slice.value}, {"participant", id}, {"to", poa}});
  disconnect(p);
  std::weak_ptr<Participant> weak = m_participants.at(id);
  auto type = *link.access_type;
  m_net.clock().scheduleAfter(SimTime::fromMs(gapMs.value_or(m_config.default_move_gap_ms)),
                              [this, weak, poa, type] {
    auto self = weak.lock();
    if (!self || self->attachment()) {
      return;
    }
    Attachment att = connect(*self, poa, type);
    if (self->roles().producer) {
      m_orch.installRoute(m_slice, self->prefix(), poa, att.face);
    }
  });
}

Participant&
Conference::participant(const std::string& id)
{
  auto it = m_participants.find(id);
  if (it == m_participants.end()) {
    throw UnknownParticipant(id + " is not in " + m_name);
  }
  return *it->second;
}

const Participant&
Conference::participant(const std::string& id) const
{
  auto it = m_participants.find(id);
  if (it == m_participants.end()) {
    throw UnknownParticipant(id + " is not in " + m_name);
  }
  return *it->second;
}

std::vector<std::string>
Conference::participantIds() const
{
  std::vector<std::string> out;
  for (const auto& [id, _] : m_participants) {
    out.push_back(id);
  }
  return out;
}

} // namespace icnslice::conf
