#ifndef ICNSLICE_CONFERENCE_CONFERENCE_HPP
#define ICNSLICE_CONFERENCE_CONFERENCE_HPP

#include "icnslice/conference/participant.hpp"
#include "icnslice/orchestrator/orchestrator.hpp"

namespace icnslice::conf {

class DuplicateParticipant : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class UnknownParticipant : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class NotProducer : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class InvalidParticipant : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

class NoSuchInterface : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// The participant is inside the detach gap of an earlier move.
class HandoffInProgress : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct ConferenceConfig
{
  double interest_lifetime_ms = core::DEFAULT_INTEREST_LIFETIME_MS;
  int retry_budget = 3;
  /// Wait before re-expressing after a no-route NACK.
  double noroute_backoff_ms = 100;
  double default_move_gap_ms = 50;
};

/// The conference service of one slice: its sync function and participants.
class Conference
{
public:
  Conference(substrate::Network& net, orch::Orchestrator& orch, SliceId slice,
             std::uint64_t seed, ConferenceConfig config = {});

  ~Conference();

  Conference(const Conference&) = delete;
  Conference& operator=(const Conference&) = delete;

  SliceId
  slice() const
  {
    return m_slice;
  }

  const std::string&
  name() const
  {
    return m_name;
  }

  /// `/conf/<name>`
  const core::Name&
  prefix() const
  {
    return m_prefix;
  }

  substrate::Network&
  network()
  {
    return m_net;
  }

  const ConferenceConfig&
  config() const
  {
    return m_config;
  }

  std::uint32_t
  mediaFreshnessMs() const;

  /// Places the sync function on the node hosting the sync vnode.
  void
  start();

  /// Stops and disconnects every participant and the sync function.
  void
  shutdown();

  Participant&
  join(const std::string& id, const NodeId& poa, Roles roles = {},
       std::optional<substrate::AccessType> iface = std::nullopt);

  void
  leave(const std::string& id);

  core::Name
  publish(const std::string& id, std::uint32_t payloadBytes);

  /// Publishes \p count segments, one every \p intervalMs, starting now.
  void
  stream(const std::string& id, std::uint32_t payloadBytes, int count, double intervalMs);

  /// Rebinds a consumer to another PoA after \p gapMs disconnected.
  void
  moveConsumer(const std::string& id, const NodeId& poa,
               std::optional<substrate::AccessType> iface = std::nullopt,
               std::optional<double> gapMs = std::nullopt);

  bool
  has(const std::string& id) const
  {
    return m_participants.count(id) > 0;
  }

  Participant&
  participant(const std::string& id);

  const Participant&
  participant(const std::string& id) const;

  std::vector<std::string>
  participantIds() const;

  SyncFunction&
  sync()
  {
    return *m_sync;
  }

  const SyncFunction&
  sync() const
  {
    return *m_sync;
  }

  /// Opens an access face for \p p at \p poa. Routes are left alone.
  Attachment
  connect(Participant& p, const NodeId& poa, std::optional<substrate::AccessType> iface);

  void
  disconnect(Participant& p);

  /// Resolves the access link used on \p poa; the first one in id order by default.
  const substrate::PhysLink&
  accessLink(const NodeId& poa, std::optional<substrate::AccessType> iface) const;

  std::uint64_t
  seed() const
  {
    return m_seed;
  }

private:
  substrate::Network& m_net;
  orch::Orchestrator& m_orch;
  SliceId m_slice;
  std::string m_name;
  core::Name m_prefix;
  std::uint64_t m_seed;
  ConferenceConfig m_config;
  std::shared_ptr<SyncFunction> m_sync;
  std::map<std::string, std::shared_ptr<Participant>> m_participants;
};

} // namespace icnslice::conf

#endif // ICNSLICE_CONFERENCE_CONFERENCE_HPP
