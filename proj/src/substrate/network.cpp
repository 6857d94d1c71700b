#include "icnslice/substrate/network.hpp"

namespace icnslice::substrate {

using core::Data;
using core::Interest;
using core::Nack;
using core::Packet;

std::uint32_t
laneOf(const Packet& packet)
{
  SliceId slice = core::sliceOf(packet);
  if (slice != CONTROL_SLICE) {
    return slice.value;
  }
  // control messages about a slice, /poa/<node>/<verb>/<slice>/..., queue with that slice
  const auto& name = core::nameOf(packet);
  if (name.size() >= 4 && name.at(0) == "poa") {
    try {
      std::size_t used = 0;
      auto v = std::stoul(name.at(3), &used);
      if (used == name.at(3).size()) {
        return static_cast<std::uint32_t>(v);
      }
    }
    catch (const std::exception&) {
    }
  }
  return slice.value;
}

Network::Network(const Topology& topo, EventClock& clock, EventLog& log)
  : m_topo(topo)
  , m_clock(clock)
  , m_log(log)
{
  for (const auto& [id, _] : topo.nodes()) {
    m_nodes[id].forwarder = std::make_unique<core::Forwarder>(id);
  }
  for (const auto& [id, link] : topo.links()) {
    if (link.isAccess()) {
      continue;
    }
    auto channel = std::make_unique<Channel>(ChannelParams{link.latency_ms, link.bandwidth_mbps});
    auto& sa = m_nodes.at(link.a);
    auto& sb = m_nodes.at(link.b);
    FaceId fa{sa.nextFace++};
    FaceId fb{sb.nextFace++};
    sa.faces[fa] = FaceSlot{FaceInfo{false, id, link.b, id, true}, channel.get(), 0, link.b, fb, nullptr};
    sb.faces[fb] = FaceSlot{FaceInfo{false, id, link.a, id, true}, channel.get(), 1, link.a, fa, nullptr};
    m_linkFaces[{link.a, id}] = fa;
    m_linkFaces[{link.b, id}] = fb;
    m_linkChannels.emplace(id, std::move(channel));
  }
}

Network::~Network() = default;

Network::NodeState&
Network::state(const NodeId& node)
{
  auto it = m_nodes.find(node);
  if (it == m_nodes.end()) {
    throw std::out_of_range("unknown node " + node);
  }
  return it->second;
}

const Network::NodeState&
Network::state(const NodeId& node) const
{
  auto it = m_nodes.find(node);
  if (it == m_nodes.end()) {
    throw std::out_of_range("unknown node " + node);
  }
  return it->second;
}

core::Forwarder&
Network::forwarder(const NodeId& node)
{
  return *state(node).forwarder;
}

const core::Forwarder&
Network::forwarder(const NodeId& node) const
{
  return *state(node).forwarder;
}

FaceId
Network::linkFace(const NodeId& node, const LinkId& link) const
{
  auto it = m_linkFaces.find({node, link});
  if (it == m_linkFaces.end()) {
    throw std::out_of_range("no face for link " + link + " on " + node);
  }
  return it->second;
}

const FaceInfo&
Network::faceInfo(const NodeId& node, FaceId face) const
{
  return state(node).faces.at(face).info;
}

FaceId
Network::attachApp(const NodeId& node, Application& app, std::string label,
                   std::optional<ChannelParams> access, LinkId accessLink)
{
  auto& ns = state(node);
  FaceId face{ns.nextFace++};
  m_appChannels.push_back(std::make_unique<Channel>(access.value_or(ChannelParams{})));
  FaceSlot slot;
  slot.info = FaceInfo{true, std::move(accessLink), label, label, true};
  slot.channel = m_appChannels.back().get();
  slot.direction = 1;
  slot.peerNode = node;
  slot.peerFace = face;
  slot.app = &app;
  ns.faces[face] = std::move(slot);
  return face;
}

void
Network::detachApp(const NodeId& node, FaceId face)
{
  auto& slot = state(node).faces.at(face);
  slot.info.up = false;
  slot.channel->setUp(false);
  slot.app = nullptr;
}

void
Network::setLinkUp(const LinkId& link, bool up)
{
  m_linkChannels.at(link)->setUp(up);
  for (auto& [_, ns] : m_nodes) {
    for (auto& [_, slot] : ns.faces) {
      if (!slot.info.isApp && slot.info.link == link) {
        slot.info.up = up;
      }
    }
  }
}

std::string
Network::faceLabel(const NodeId& node, FaceId face) const
{
  const auto& faces = state(node).faces;
  auto it = faces.find(face);
  return it == faces.end() ? "?" : it->second.info.label;
}

void
Network::logTx(const NodeId& node, FaceId face, bool fromApp, const Packet& packet)
{
  TxRecord rec{m_clock.now(), node, face, fromApp, &packet};
  for (const auto& tap : m_taps) {
    tap(rec);
  }
  if (!m_log.enabled()) {
    return;
  }
  nlohmann::json f;
  f["node"] = node;
  // labels, unlike face numbers, do not depend on what other slices attached
  f["face"] = faceLabel(node, face);
  f["dir"] = fromApp ? "app>fwd" : "fwd>";
  f["pkt"] = core::kindOf(packet);
  f["name"] = core::nameOf(packet).toUri();
  if (const auto* i = std::get_if<Interest>(&packet)) {
    f["nonce"] = i->nonce;
    if (i->forwarding_hint) {
      f["hint"] = i->forwarding_hint->toUri();
    }
  }
  else if (const auto* n = std::get_if<Nack>(&packet)) {
    f["nonce"] = n->nonce;
    f["reason"] = core::toString(n->reason);
  }
  f["slice"] = core::sliceOf(packet).value;
  m_log.record(m_clock.now(), "tx", std::move(f));
}

void
Network::logDrop(const NodeId& node, FaceId face, const Packet& packet, const char* reason)
{
  ++m_dropped;
  if (!m_log.enabled()) {
    return;
  }
  m_log.record(m_clock.now(), "drop",
               {{"node", node}, {"face", faceLabel(node, face)}, {"pkt", core::kindOf(packet)},
                {"name", core::nameOf(packet).toUri()}, {"reason", reason},
                {"slice", core::sliceOf(packet).value}});
}

void
Network::sendFromApp(const NodeId& node, FaceId face, Packet packet)
{
  auto& slot = state(node).faces.at(face);
  if (!slot.info.isApp) {
    throw std::logic_error("face is not an application face");
  }
  logTx(node, face, true, packet);
  SimTime arrival;
  try {
    arrival = slot.channel->transmit(0, laneOf(packet), core::wireSize(packet),
                                     m_clock.now());
  }
  catch (const LinkDown&) {
    logDrop(node, face, packet, "link-down");
    return;
  }
  Channel* channel = slot.channel;
  auto gen = channel->generation();
  m_clock.schedule(arrival, [this, node, face, channel, gen, p = std::move(packet)] {
    if (!channel->isUp() || channel->generation() != gen) {
      logDrop(node, face, p, "link-down");
      return;
    }
    deliverToForwarder(node, face, p);
  });
}

void
Network::transmit(const NodeId& node, FaceId face, Packet packet)
{
  auto& ns = state(node);
  auto it = ns.faces.find(face);
  if (it == ns.faces.end()) {
    logDrop(node, face, packet, "no-face");
    return;
  }
  FaceSlot& slot = it->second;
  logTx(node, face, false, packet);
  SimTime arrival;
  try {
    arrival = slot.channel->transmit(slot.direction, laneOf(packet),
                                     core::wireSize(packet), m_clock.now());
  }
  catch (const LinkDown&) {
    logDrop(node, face, packet, "link-down");
    return;
  }
  Channel* channel = slot.channel;
  auto gen = channel->generation();
  if (slot.info.isApp) {
    Application* app = slot.app;
    m_clock.schedule(arrival, [this, node, face, channel, gen, app, p = std::move(packet)] {
      auto& s = state(node).faces.at(face);
      if (!channel->isUp() || channel->generation() != gen || s.app != app || app == nullptr) {
        logDrop(node, face, p, "link-down");
        return;
      }
      deliverToApp(*app, p);
    });
    return;
  }
  NodeId peer = slot.peerNode;
  FaceId peerFace = slot.peerFace;
  m_clock.schedule(arrival, [this, peer, peerFace, channel, gen, p = std::move(packet)] {
    if (!channel->isUp() || channel->generation() != gen) {
      logDrop(peer, peerFace, p, "link-down");
      return;
    }
    deliverToForwarder(peer, peerFace, p);
  });
}

void
Network::deliverToForwarder(const NodeId& node, FaceId face, const Packet& packet)
{
  auto& fwd = forwarder(node);
  SimTime now = m_clock.now();
  core::ForwardingActions actions;
  if (const auto* i = std::get_if<Interest>(&packet)) {
    actions = fwd.onInterest(face, *i, now);
  }
  else if (const auto* d = std::get_if<Data>(&packet)) {
    actions = fwd.onData(face, *d, now);
  }
  else {
    actions = fwd.onNack(face, std::get<Nack>(packet), now);
  }
  dispatch(node, std::move(actions));
}

void
Network::deliverToApp(Application& app, const Packet& packet)
{
  if (const auto* i = std::get_if<Interest>(&packet)) {
    app.onInterest(*i);
  }
  else if (const auto* d = std::get_if<Data>(&packet)) {
    app.onData(*d);
  }
  else {
    app.onNack(std::get<Nack>(packet));
  }
}

void
Network::dispatch(const NodeId& node, core::ForwardingActions actions)
{
  for (auto& out : actions.out) {
    transmit(node, out.face, std::move(out.packet));
  }
  if (actions.wakeAt) {
    scheduleSweep(node, actions.wakeSlice, *actions.wakeAt);
  }
}

void
Network::scheduleSweep(const NodeId& node, SliceId slice, SimTime at)
{
  auto& ns = state(node);
  if (!ns.sweeps.insert({slice, at}).second) {
    return;
  }
  m_clock.schedule(at, [this, node, slice, at] {
    state(node).sweeps.erase({slice, at});
    auto result = forwarder(node).pitSweep(slice, m_clock.now());
    for (const auto& e : result.entries) {
      for (const auto& l : m_expiryListeners) {
        l(node, e);
      }
    }
    dispatch(node, std::move(result.actions));
  });
}

} // namespace icnslice::substrate
