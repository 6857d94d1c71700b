#ifndef ICNSLICE_SUBSTRATE_EVENT_CLOCK_HPP
#define ICNSLICE_SUBSTRATE_EVENT_CLOCK_HPP

#include "icnslice/common.hpp"

#include <functional>
#include <optional>
#include <queue>
#include <vector>

namespace icnslice::substrate {

/** \brief Deterministic discrete-event scheduler.
 *
 *  Events run in (time, insertion sequence) order. Time never moves
 *  backwards, and nothing depends on wall-clock time.
 */
class EventClock
{
public:
  using Callback = std::function<void()>;

  explicit
  EventClock(std::uint64_t seed = 0)
    : m_seed(seed)
  {
  }

  SimTime
  now() const
  {
    return m_now;
  }

  std::uint64_t
  seed() const
  {
    return m_seed;
  }

  /// Throws std::logic_error if \p at lies in the past.
  void
  schedule(SimTime at, Callback cb);

  void
  scheduleAfter(SimTime delay, Callback cb)
  {
    schedule(m_now + delay, std::move(cb));
  }

  /// Dispatches the next event. Returns false if the queue is empty.
  bool
  step();

  /// Dispatches every event with time <= \p until, then sets now to \p until.
  void
  runUntil(SimTime until);

  std::optional<SimTime>
  nextEventTime() const;

  bool
  empty() const
  {
    return m_queue.empty();
  }

  std::size_t
  pending() const
  {
    return m_queue.size();
  }

  std::uint64_t
  dispatched() const
  {
    return m_dispatched;
  }

private:
  struct Event
  {
    SimTime at;
    std::uint64_t seq;
    Callback cb;
  };

  struct Later
  {
    bool
    operator()(const Event& x, const Event& y) const
    {
      if (x.at != y.at) {
        return x.at > y.at;
      }
      return x.seq > y.seq;
    }
  };

  SimTime m_now;
  std::uint64_t m_seed;
  std::uint64_t m_seq = 0;
  std::uint64_t m_dispatched = 0;
  std::priority_queue<Event, std::vector<Event>, Later> m_queue;
};

} // namespace icnslice::substrate

#endif // ICNSLICE_SUBSTRATE_EVENT_CLOCK_HPP
