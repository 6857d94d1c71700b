#include "icnslice/substrate/event_log.hpp"

namespace icnslice::substrate {

void
EventLog::record(SimTime t, std::string_view kind, nlohmann::json fields)
{
  if (!m_enabled) {
    return;
  }
  nlohmann::ordered_json rec;
  rec["t_ms"] = t.ms();
  rec["kind"] = kind;
  for (auto& [k, v] : fields.items()) {
    rec[k] = v;
  }
  std::string line = rec.dump();
  for (const auto& l : m_listeners) {
    l(kind, line);
  }
  if (m_retain) {
    m_lines.push_back(std::move(line));
  }
}

std::vector<std::string>
EventLog::linesForSlice(SliceId slice) const
{
  std::vector<std::string> out;
  for (const auto& line : m_lines) {
    auto rec = nlohmann::json::parse(line);
    auto it = rec.find("slice");
    if (it != rec.end() && it->is_number_unsigned() && it->get<std::uint32_t>() == slice.value) {
      out.push_back(line);
    }
  }
  return out;
}

std::string
EventLog::text() const
{
  std::string out;
  for (const auto& line : m_lines) {
    out += line;
    out += '\n';
  }
  return out;
}

} // namespace icnslice::substrate
