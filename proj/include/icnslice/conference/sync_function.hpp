#ifndef ICNSLICE_CONFERENCE_SYNC_FUNCTION_HPP
#define ICNSLICE_CONFERENCE_SYNC_FUNCTION_HPP

#include "icnslice/substrate/network.hpp"

#include <memory>

namespace icnslice::conf {

class Conference;

struct SyncState
{
  SliceId conference;
  /// Latest published sequence per participant, -1 before the first publish.
  std::map<std::string, std::int64_t> roster;
  std::uint64_t version = 0;

  nlohmann::json
  toJson() const;

  static SyncState
  fromJson(const nlohmann::json& j);
};

/** \brief In-network service function that keeps the conference roster.
 *
 *  Answers `/conf/<s>/sync/state/<v>` with the full roster once the version
 *  exceeds v, holding the Interest until then (long poll), and consumes
 *  `/conf/<s>/sync/update/<p>/<seq>` from producers.
 */
class SyncFunction : public substrate::Application
{
public:
  explicit
  SyncFunction(Conference& conf);

  void
  attach(const NodeId& node, FaceId face);

  void
  detach();

  const std::optional<NodeId>&
  node() const
  {
    return m_node;
  }

  FaceId
  face() const
  {
    return m_face;
  }

  const SyncState&
  state() const
  {
    return m_state;
  }

  void
  addParticipant(const std::string& id);

  void
  removeParticipant(const std::string& id);

  /// Raises \p id's latest sequence; false if unknown or not newer.
  bool
  advance(const std::string& id, std::int64_t seq);

  std::size_t
  pendingPolls() const
  {
    return m_pending.size();
  }

  void
  onInterest(const core::Interest& interest) override;

private:
  struct Pending
  {
    core::Name name;
    std::uint64_t known;
    SimTime expires;
  };

  void
  changed();

  void
  answerPending();

  void
  reply(const core::Name& name, std::string body);

private:
  Conference& m_conf;
  SyncState m_state;
  std::optional<NodeId> m_node;
  FaceId m_face;
  std::vector<Pending> m_pending;
};

} // namespace icnslice::conf

#endif // ICNSLICE_CONFERENCE_SYNC_FUNCTION_HPP
