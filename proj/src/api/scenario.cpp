#include "icnslice/api/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace icnslice::api {

const std::vector<std::string>&
ScenarioScript::knownCommands()
{
  static const std::vector<std::string> names{
    "create_slice", "delete_slice", "set_mobility", "join", "leave", "publish",
    "handoff", "move", "adapt", "stop",
  };
  return names;
}

ScenarioScript
ScenarioScript::parse(const std::string& ndjson)
{
  ScenarioScript script;
  std::istringstream in(ndjson);
  std::string text;
  std::size_t lineNo = 0;
  double last = 0;
  while (std::getline(in, text)) {
    ++lineNo;
    auto first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos || text[first] == '#') {
      continue;
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::parse_error& e) {
      throw ScriptError(lineNo, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) {
      throw ScriptError(lineNo, "expected a JSON object");
    }
    ScriptCommand cmd;
    cmd.line = lineNo;
    if (!j.contains("at_ms") || !j["at_ms"].is_number()) {
      throw ScriptError(lineNo, "at_ms: expected number");
    }
    cmd.at_ms = j["at_ms"].get<double>();
    if (cmd.at_ms < 0) {
      throw ScriptError(lineNo, "at_ms: must be non-negative");
    }
    if (cmd.at_ms < last) {
      throw ScriptError(lineNo, "at_ms decreases");
    }
    last = cmd.at_ms;
    if (!j.contains("command") || !j["command"].is_string()) {
      throw ScriptError(lineNo, "command: expected string");
    }
    cmd.command = j["command"].get<std::string>();
    const auto& known = knownCommands();
    if (std::find(known.begin(), known.end(), cmd.command) == known.end()) {
      throw ScriptError(lineNo, "unknown command '" + cmd.command + "'");
    }
    if (j.contains("args")) {
      if (!j["args"].is_object()) {
        throw ScriptError(lineNo, "args: expected object");
      }
      cmd.args = j["args"];
    }
    script.commands.push_back(std::move(cmd));
  }
  return script;
}

ScenarioScript
ScenarioScript::loadFile(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw ScriptError(0, "cannot open " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

} // namespace icnslice::api
