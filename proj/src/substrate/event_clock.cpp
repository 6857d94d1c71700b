#include "icnslice/substrate/event_clock.hpp"

namespace icnslice::substrate {

void
EventClock::schedule(SimTime at, Callback cb)
{
  if (at < m_now) {
    throw std::logic_error("cannot schedule an event in the past");
  }
  m_queue.push(Event{at, m_seq++, std::move(cb)});
}

bool
EventClock::step()
{
  if (m_queue.empty()) {
    return false;
  }
  // copy out before pop; the callback may schedule more events
  Event ev = m_queue.top();
  m_queue.pop();
  m_now = ev.at;
  ++m_dispatched;
  ev.cb();
  return true;
}

void
EventClock::runUntil(SimTime until)
{
  while (!m_queue.empty() && m_queue.top().at <= until) {
    step();
  }
  if (until > m_now) {
    m_now = until;
  }
}

std::optional<SimTime>
EventClock::nextEventTime() const
{
  if (m_queue.empty()) {
    return std::nullopt;
  }
  return m_queue.top().at;
}

} // namespace icnslice::substrate
