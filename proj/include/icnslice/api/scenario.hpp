#ifndef ICNSLICE_API_SCENARIO_HPP
#define ICNSLICE_API_SCENARIO_HPP

#include "json.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace icnslice::api {

/// Malformed scenario script; line() is 1-based.
class ScriptError : public std::runtime_error
{
public:
  ScriptError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message)
    , m_line(line)
  {
  }

  std::size_t
  line() const
  {
    return m_line;
  }

private:
  std::size_t m_line;
};

struct ScriptCommand
{
  double at_ms = 0;
  std::string command;
  nlohmann::json args = nlohmann::json::object();
  std::size_t line = 0;
};

/// Timestamped commands, one JSON object per line. Blank lines and lines
/// starting with '#' are skipped.
struct ScenarioScript
{
  std::vector<ScriptCommand> commands;

  static ScenarioScript
  parse(const std::string& ndjson);

  static ScenarioScript
  loadFile(const std::string& path);

  /// Every command name the engine understands.
  static const std::vector<std::string>&
  knownCommands();
};

} // namespace icnslice::api

#endif // ICNSLICE_API_SCENARIO_HPP
