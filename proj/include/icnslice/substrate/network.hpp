#ifndef ICNSLICE_SUBSTRATE_NETWORK_HPP
#define ICNSLICE_SUBSTRATE_NETWORK_HPP

#include "icnslice/core/forwarder.hpp"
#include "icnslice/substrate/event_clock.hpp"
#include "icnslice/substrate/event_log.hpp"
#include "icnslice/substrate/link_model.hpp"
#include "icnslice/substrate/topology.hpp"

#include <functional>
#include <map>
#include <memory>
#include <set>

namespace icnslice::substrate {

/// An endpoint that sends and receives packets through one forwarder face.
class Application
{
public:
  virtual
  ~Application() = default;

  virtual void
  onInterest(const core::Interest&)
  {
  }

  virtual void
  onData(const core::Data&)
  {
  }

  virtual void
  onNack(const core::Nack&)
  {
  }
};

struct FaceInfo
{
  bool isApp = false;
  /// Infrastructure link for link faces, access link (if any) for app faces.
  LinkId link;
  NodeId peer;
  std::string label;
  bool up = true;
};

/// Queueing lane of a packet on shared links: its slice, or for control
/// messages the slice they concern.
std::uint32_t
laneOf(const core::Packet& packet);

/// One packet handed to a channel.
struct TxRecord
{
  SimTime at;
  NodeId node;
  FaceId face;
  /// True when an application sent it toward its forwarder.
  bool fromApp = false;
  const core::Packet* packet = nullptr;
};

/** \brief Runs every substrate node's forwarder and moves packets between them.
 *
 *  Each transmission becomes a delivery event at the channel's arrival time.
 */
class Network
{
public:
  Network(const Topology& topo, EventClock& clock, EventLog& log);
  ~Network();

  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  const Topology&
  topology() const
  {
    return m_topo;
  }

  EventClock&
  clock()
  {
    return m_clock;
  }

  EventLog&
  log()
  {
    return m_log;
  }

  core::Forwarder&
  forwarder(const NodeId& node);

  const core::Forwarder&
  forwarder(const NodeId& node) const;

  /// The face on \p node that sends over infrastructure link \p link.
  FaceId
  linkFace(const NodeId& node, const LinkId& link) const;

  const FaceInfo&
  faceInfo(const NodeId& node, FaceId face) const;

  std::string
  faceLabel(const NodeId& node, FaceId face) const;

  /// Connects \p app to \p node. With \p access the app sits behind a
  /// dedicated channel using those parameters; otherwise it is local.
  FaceId
  attachApp(const NodeId& node, Application& app, std::string label,
            std::optional<ChannelParams> access = std::nullopt, LinkId accessLink = {});

  /// Takes the face down. Its FIB routes stay; packets sent to it are lost.
  void
  detachApp(const NodeId& node, FaceId face);

  /// Sends from an application to its forwarder.
  void
  sendFromApp(const NodeId& node, FaceId face, core::Packet packet);

  /// Emits the forwarder's outgoing packets and schedules PIT expiry.
  void
  dispatch(const NodeId& node, core::ForwardingActions actions);

  void
  setLinkUp(const LinkId& link, bool up);

  /// Sweeps \p slice's PIT on \p node at \p at.
  void
  scheduleSweep(const NodeId& node, SliceId slice, SimTime at);

  void
  addTap(std::function<void(const TxRecord&)> tap)
  {
    m_taps.push_back(std::move(tap));
  }

  void
  addExpiryListener(std::function<void(const NodeId&, const core::ExpiredEntry&)> listener)
  {
    m_expiryListeners.push_back(std::move(listener));
  }

  std::uint64_t
  droppedPackets() const
  {
    return m_dropped;
  }

private:
  struct FaceSlot
  {
    FaceInfo info;
    Channel* channel = nullptr;
    /// Direction this face transmits in on its channel.
    int direction = 0;
    NodeId peerNode;
    FaceId peerFace;
    Application* app = nullptr;
  };

  struct NodeState
  {
    std::unique_ptr<core::Forwarder> forwarder;
    std::map<FaceId, FaceSlot> faces;
    std::uint32_t nextFace = 1;
    std::set<std::pair<SliceId, SimTime>> sweeps;
  };

  NodeState&
  state(const NodeId& node);

  const NodeState&
  state(const NodeId& node) const;

  void
  transmit(const NodeId& node, FaceId face, core::Packet packet);

  void
  deliverToForwarder(const NodeId& node, FaceId face, const core::Packet& packet);

  void
  deliverToApp(Application& app, const core::Packet& packet);

  void
  logTx(const NodeId& node, FaceId face, bool fromApp, const core::Packet& packet);

  void
  logDrop(const NodeId& node, FaceId face, const core::Packet& packet, const char* reason);

private:
  const Topology& m_topo;
  EventClock& m_clock;
  EventLog& m_log;
  std::map<NodeId, NodeState> m_nodes;
  std::map<LinkId, std::unique_ptr<Channel>> m_linkChannels;
  std::vector<std::unique_ptr<Channel>> m_appChannels;
  std::map<std::pair<NodeId, LinkId>, FaceId> m_linkFaces;
  std::vector<std::function<void(const TxRecord&)>> m_taps;
  std::vector<std::function<void(const NodeId&, const core::ExpiredEntry&)>> m_expiryListeners;
  std::uint64_t m_dropped = 0;
};

} // namespace icnslice::substrate

#endif // ICNSLICE_SUBSTRATE_NETWORK_HPP
