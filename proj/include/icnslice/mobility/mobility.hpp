#ifndef ICNSLICE_MOBILITY_MOBILITY_HPP
#define ICNSLICE_MOBILITY_MOBILITY_HPP

#include "icnslice/conference/conference.hpp"

#include <deque>
#include <random>

namespace icnslice::mob {

class MobilityDisabled : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};


struct MapEntry
{
  /// Topological name of the PoA currently serving the prefix.
  core::Name topo{"_"};
  /// Set only on the PoA named by topo.
  std::optional<FaceId> local_face;
  std::uint64_t epoch = 0;
};

/// Mobility state kept by one point of attachment.
struct PoAState
{
  NodeId node;
  core::Name topo_name{"_"};
  FaceId agent_face;
  std::map<SliceId, std::map<core::Name, MapEntry>> prefix_map;
  /// Ingress PoAs seen forwarding Interests for a prefix this epoch.
  std::map<std::pair<SliceId, core::Name>, std::set<NodeId>> provenance;
  /// Ingress PoAs already sent the current mapping.
  std::map<std::pair<SliceId, core::Name>, std::set<NodeId>> notified;
  /// When each locally mapped prefix lost its producer, while it is away.
  std::map<std::pair<SliceId, core::Name>, SimTime> detached_at;

  nlohmann::json
  toJson() const;
};

struct HandoffEvent
{
  core::Name prefix{"_"};
  NodeId from_poa;
  substrate::AccessType from_iface = substrate::AccessType::WiFi;
  NodeId to_poa;
  substrate::AccessType to_iface = substrate::AccessType::WiFi;
  SimTime at;
  double detach_gap_ms = 50;
};

struct HandoffReport
{
  enum class Status {
    InProgress,
    Completed,
    MobilityDisabled,
  };

  std::uint64_t id = 0;
  SliceId slice;
  std::string participant;
  HandoffEvent event;
  Status status = Status::InProgress;
  std::uint64_t epoch = 0;
  std::uint64_t interests_late_bound = 0;
  std::uint64_t interests_lost = 0;
  std::uint64_t ingress_updates = 0;
  /// Forwarders visited over forwarders on the shortest path, first and
  /// latest Interest reaching the new PoA.
  std::optional<double> stretch_before;
  std::optional<double> stretch_after;
  /// The same ratio counted in links.
  std::optional<double> link_stretch_before;
  std::optional<double> link_stretch_after;
  std::optional<SimTime> attached_at;
  std::optional<SimTime> rebound_at;
  /// Detach until the producer next answers an Interest.
  std::optional<double> interruption_ms;
  /// Lost Interests are counted until the next handoff of the prefix.
  bool open = true;

  nlohmann::json
  toJson() const;
};

std::string
toString(HandoffReport::Status status);

struct StretchSample
{
  SimTime at;
  SliceId slice;
  core::Name prefix{"_"};
  NodeId poa;
  NodeId ingress;
  double ratio = 1;
  double link_ratio = 1;
};

/** \brief Producer mobility offered per slice by the PoAs.
 *
 *  PoAs map producer prefixes to the topological name of the PoA currently
 *  serving them. After a handoff the new PoA notifies the old one, which
 *  re-expresses pending Interests toward the new location (late binding) and
 *  tells the ingress PoAs it saw so they route there directly.
 *  Control messages are Interests in the control slice under `/poa/<node>`.
 */
class MobilityService
{
public:
  MobilityService(substrate::Network& net, orch::Orchestrator& orch, std::uint64_t seed,
                  double holdMs = 2.0 * core::DEFAULT_INTEREST_LIFETIME_MS);

  ~MobilityService();

  MobilityService(const MobilityService&) = delete;
  MobilityService& operator=(const MobilityService&) = delete;

  /// Provisions the control slice and a mobility agent on every PoA.
  void
  install();

  void
  setMobility(SliceId slice, bool enabled, conf::Conference& conf);

  bool
  enabled(SliceId slice) const
  {
    return m_enabled.count(slice) > 0;
  }

  /// Records a fresh attachment of \p p; called after join.
  void
  producerJoined(conf::Conference& conf, conf::Participant& p);

  void
  forget(SliceId slice, const core::Name& prefix);

  void
  forgetSlice(SliceId slice);

  /** \brief Moves producer \p pid to \p toPoa over \p iface.
   *
   *  The producer is detached now and attaches after the gap. With mobility
   *  disabled the move still happens, unassisted, and the report is marked
   *  MobilityDisabled.
   */
  const HandoffReport&
  handoff(conf::Conference& conf, const std::string& pid, const NodeId& toPoa,
          std::optional<substrate::AccessType> iface, std::optional<double> gapMs);

  const PoAState&
  poa(const NodeId& node) const;

  std::vector<NodeId>
  poaIds() const;

  const std::deque<HandoffReport>&
  reports() const
  {
    return m_reports;
  }

  const std::vector<StretchSample>&
  stretchSamples() const
  {
    return m_samples;
  }

  double
  holdMs() const
  {
    return m_holdMs;
  }

  double defaultGapMs = 50;

private:
  class Agent;

  PoAState&
  state(const NodeId& node);

  core::InterestDecision
  resolve(const NodeId& node, SliceId slice, const core::Interest& interest, FaceId inFace,
          SimTime now);

  void
  bindLocal(conf::Conference& conf, conf::Participant& p, HandoffReport* report,
            const NodeId& oldPoa);

  void
  onControl(const NodeId& node, const core::Interest& interest);

  void
  onMoved(const NodeId& node, SliceId slice, std::uint64_t epoch, const NodeId& newPoa,
          const core::Name& prefix);

  void
  onMapping(const NodeId& node, SliceId slice, std::uint64_t epoch, const NodeId& newPoa,
            const core::Name& prefix);

  void
  sendControl(const NodeId& from, const NodeId& to, const std::string& verb, SliceId slice,
              std::uint64_t epoch, const NodeId& newPoa, const core::Name& prefix);

  std::uint64_t
  nonce(SliceId slice, const NodeId& node);

  HandoffReport*
  currentReport(SliceId slice, const core::Name& prefix);

  void
  onExpired(const NodeId& node, const core::ExpiredEntry& e);

  const MapEntry*
  lookup(const PoAState& st, SliceId slice, const core::Name& name, core::Name* prefix) const;

private:
  substrate::Network& m_net;
  orch::Orchestrator& m_orch;
  std::uint64_t m_seed;
  double m_holdMs;
  std::map<NodeId, PoAState> m_poas;
  std::map<NodeId, std::unique_ptr<Agent>> m_agents;
  std::set<SliceId> m_enabled;
  std::map<std::pair<SliceId, NodeId>, std::mt19937_64> m_rngs;
  std::deque<HandoffReport> m_reports;
  std::map<std::pair<SliceId, core::Name>, std::size_t> m_current;
  std::vector<StretchSample> m_samples;
  std::map<std::pair<SliceId, core::Name>, double> m_lastLoggedStretch;
  bool m_installed = false;
};

} // namespace icnslice::mob

#endif // ICNSLICE_MOBILITY_MOBILITY_HPP
