#ifndef ICNSLICE_CONFERENCE_PARTICIPANT_HPP
#define ICNSLICE_CONFERENCE_PARTICIPANT_HPP

#include "icnslice/conference/sync_function.hpp"

#include <random>

namespace icnslice::conf {

struct Roles
{
  bool producer = true;
  bool consumer = true;

  static Roles
  fromJson(const nlohmann::json& j);

  nlohmann::json
  toJson() const;
};

struct Attachment
{
  NodeId poa;
  substrate::AccessType iface = substrate::AccessType::WiFi;
  LinkId link;
  FaceId face;
};

/// Delivery statistics of one consumer.
struct ConsumerStats
{
  std::uint64_t delivered = 0;
  double latency_sum_ms = 0;
  std::uint64_t retries = 0;
  std::uint64_t abandoned = 0;
  std::uint64_t polls = 0;
};

/** \brief A conference endpoint: producer, consumer or both.
 *
 *  Advances only from packet deliveries and its own clock timers.
 */
class Participant : public substrate::Application, public std::enable_shared_from_this<Participant>
{
public:
  Participant(Conference& conf, std::string id, Roles roles, std::uint64_t seed);

  const std::string&
  id() const
  {
    return m_id;
  }

  Conference&
  conference() const
  {
    return m_conf;
  }

  const Roles&
  roles() const
  {
    return m_roles;
  }

  /// `/conf/<slice>/<id>`
  core::Name
  prefix() const;

  const std::optional<Attachment>&
  attachment() const
  {
    return m_att;
  }

  std::int64_t
  nextSeq() const
  {
    return m_nextSeq;
  }

  /// Number of attachments so far; the producer's mobility epoch.
  std::uint64_t
  epoch() const
  {
    return m_epoch;
  }

  const std::map<std::string, std::int64_t>&
  fetchCursor() const
  {
    return m_cursor;
  }

  const SyncState&
  roster() const
  {
    return m_roster;
  }

  /// Media Interests answered by this producer.
  std::uint64_t
  served() const
  {
    return m_served;
  }

  const ConsumerStats&
  stats() const
  {
    return m_stats;
  }

  /// (producer, seq) pairs received, in arrival order.
  const std::vector<std::pair<std::string, std::int64_t>>&
  received() const
  {
    return m_receivedOrder;
  }

  std::size_t
  outstanding() const
  {
    return m_outstanding.size();
  }

  std::optional<SimTime>
  lastServeAt() const
  {
    return m_lastServe;
  }

  /// Called after every media Interest this producer answers.
  void
  setServeHook(std::function<void(const Participant&)> hook)
  {
    m_serveHook = std::move(hook);
  }

  /// Stores the next media segment and announces it to the sync function.
  core::Name
  publish(std::uint32_t payloadBytes);

  void
  attached(const Attachment& att);

  void
  detached();

  /// Starts polling; consumers only.
  void
  start();

  /// Cancels every timer; nothing is sent afterwards.
  void
  stop();

  void
  onInterest(const core::Interest& interest) override;

  void
  onData(const core::Data& data) override;

  void
  onNack(const core::Nack& nack) override;

private:
  struct Fetch
  {
    int attempt = 0;
    std::uint64_t nonce = 0;
    SimTime first_sent;
    std::uint64_t token = 0;
  };

  using Key = std::pair<std::string, std::int64_t>;

  std::uint64_t
  nonce()
  {
    return m_rng();
  }

  void
  send(core::Packet packet);

  std::uint32_t
  lifetimeFor(int attempt) const;

  void
  poll(double delayMs = 0);

  void
  sendPoll();

  void
  onRoster(const SyncState& state);

  void
  fetchMissing();

  void
  express(const Key& key);

  void
  fetchFailed(const Key& key, std::uint64_t nonce, bool noRoute);

  void
  sendSyncUpdate();

  void
  after(double ms, std::function<void(Participant&)> fn);

private:
  Conference& m_conf;
  std::string m_id;
  Roles m_roles;
  std::mt19937_64 m_rng;
  std::optional<Attachment> m_att;
  std::uint64_t m_epoch = 0;
  bool m_active = false;
  std::uint64_t m_generation = 0;

  // producer
  std::int64_t m_nextSeq = 0;
  std::map<std::int64_t, core::Data> m_store;
  std::uint64_t m_served = 0;
  std::optional<SimTime> m_lastServe;
  std::function<void(const Participant&)> m_serveHook;
  std::int64_t m_syncAcked = -1;
  std::uint64_t m_syncNonce = 0;
  int m_syncAttempts = 0;

  // consumer
  SyncState m_roster;
  std::uint64_t m_pollNonce = 0;
  std::uint64_t m_pollToken = 0;
  std::map<std::string, std::int64_t> m_cursor;
  std::map<Key, Fetch> m_outstanding;
  std::set<Key> m_received;
  std::vector<Key> m_receivedOrder;
  ConsumerStats m_stats;
  std::uint64_t m_nextToken = 1;
};

} // namespace icnslice::conf

#endif // ICNSLICE_CONFERENCE_PARTICIPANT_HPP
