#ifndef ICNSLICE_SUBSTRATE_EVENT_LOG_HPP
#define ICNSLICE_SUBSTRATE_EVENT_LOG_HPP

#include "icnslice/common.hpp"

#include "json.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace icnslice::substrate {

/// Newline-delimited JSON records of the form {t_ms, kind, ...fields}.
class EventLog
{
public:
  void
  record(SimTime t, std::string_view kind, nlohmann::json fields = nlohmann::json::object());

  const std::vector<std::string>&
  lines() const
  {
    return m_lines;
  }

  /// Records whose "slice" field equals \p slice.
  std::vector<std::string>
  linesForSlice(SliceId slice) const;

  std::string
  text() const;

  void
  setEnabled(bool enabled)
  {
    m_enabled = enabled;
  }

  bool
  enabled() const
  {
    return m_enabled;
  }

  void
  clear()
  {
    m_lines.clear();
  }

  /// Keep records in memory; listeners are told either way.
  void
  setRetain(bool retain)
  {
    m_retain = retain;
  }

  void
  addListener(std::function<void(std::string_view kind, const std::string& line)> listener)
  {
    m_listeners.push_back(std::move(listener));
  }

private:
  std::vector<std::string> m_lines;
  std::vector<std::function<void(std::string_view, const std::string&)>> m_listeners;
  bool m_enabled = true;
  bool m_retain = true;
};

} // namespace icnslice::substrate

#endif // ICNSLICE_SUBSTRATE_EVENT_LOG_HPP
