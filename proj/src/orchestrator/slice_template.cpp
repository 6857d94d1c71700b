#include "icnslice/orchestrator/slice_template.hpp"

#include <set>

namespace icnslice::orch {

using nlohmann::json;

namespace {

const json&
require(const json& obj, const std::string& path, const char* key)
{
  if (!obj.contains(key)) {
    throw TemplateError(path.empty() ? key : path + "." + key, "missing");
  }
  return obj.at(key);
}

std::string
join(const std::string& path, const char* key)
{
  return path.empty() ? std::string(key) : path + "." + key;
}

bool
validComponent(const std::string& s)
{
  return !s.empty() && s.find('/') == std::string::npos;
}

} // namespace

SliceTemplate
SliceTemplate::fromJson(const json& doc)
{
  if (!doc.is_object()) {
    throw TemplateError("$", "expected object");
  }
  SliceTemplate t;

  const auto& name = require(doc, "", "slice_name");
  if (!name.is_string()) {
    throw TemplateError("slice_name", "expected string");
  }
  t.slice_name = name.get<std::string>();

  const auto& sites = require(doc, "", "sites");
  if (!sites.is_array()) {
    throw TemplateError("sites", "expected array");
  }
  for (std::size_t i = 0; i < sites.size(); ++i) {
    std::string path = "sites[" + std::to_string(i) + "]";
    const auto& s = sites[i];
    if (!s.is_object()) {
      throw TemplateError(path, "expected object");
    }
    SiteSpec site;
    const auto& id = require(s, path, "site_id");
    const auto& poa = require(s, path, "poa_node_id");
    const auto& count = require(s, path, "expected_participants");
    if (!id.is_string()) {
      throw TemplateError(join(path, "site_id"), "expected string");
    }
    if (!poa.is_string()) {
      throw TemplateError(join(path, "poa_node_id"), "expected string");
    }
    if (!count.is_number_integer()) {
      throw TemplateError(join(path, "expected_participants"), "expected integer");
    }
    site.site_id = id.get<std::string>();
    site.poa_node_id = poa.get<std::string>();
    site.expected_participants = count.get<int>();
    t.sites.push_back(std::move(site));
  }

  const auto& kbps = require(doc, "", "per_stream_kbps");
  if (!kbps.is_number_integer()) {
    throw TemplateError("per_stream_kbps", "expected integer");
  }
  t.per_stream_kbps = kbps.get<std::int64_t>();

  const auto& lat = require(doc, "", "latency_bound_ms");
  if (!lat.is_number()) {
    throw TemplateError("latency_bound_ms", "expected number");
  }
  t.latency_bound_ms = lat.get<double>();

  if (doc.contains("mobility_enabled")) {
    if (!doc["mobility_enabled"].is_boolean()) {
      throw TemplateError("mobility_enabled", "expected boolean");
    }
    t.mobility_enabled = doc["mobility_enabled"].get<bool>();
  }
  if (doc.contains("cache_window_s")) {
    if (!doc["cache_window_s"].is_number()) {
      throw TemplateError("cache_window_s", "expected number");
    }
    t.cache_window_s = doc["cache_window_s"].get<double>();
  }
  for (const char* key : {"availability", "security"}) {
    if (doc.contains(key)) {
      if (!doc[key].is_string()) {
        throw TemplateError(key, "expected string");
      }
      (std::string_view(key) == "availability" ? t.availability : t.security) =
        doc[key].get<std::string>();
    }
  }

  t.validate();
  return t;
}

json
SliceTemplate::toJson() const
{
  json sitesJson = json::array();
  for (const auto& s : sites) {
    sitesJson.push_back({{"site_id", s.site_id},
                         {"poa_node_id", s.poa_node_id},
                         {"expected_participants", s.expected_participants}});
  }
  return {{"slice_name", slice_name},
          {"sites", sitesJson},
          {"per_stream_kbps", per_stream_kbps},
          {"latency_bound_ms", latency_bound_ms},
          {"mobility_enabled", mobility_enabled},
          {"cache_window_s", cache_window_s},
          {"availability", availability},
          {"security", security}};
}

void
SliceTemplate::validate() const
{
  if (!validComponent(slice_name)) {
    throw TemplateError("slice_name", "must be a non-empty name component");
  }
  if (sites.size() < 2) {
    throw TemplateError("sites", "a conference slice needs at least 2 sites");
  }
  std::set<std::string> poas;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    std::string path = "sites[" + std::to_string(i) + "]";
    const auto& s = sites[i];
    if (!validComponent(s.site_id)) {
      throw TemplateError(path + ".site_id", "must be a non-empty name component");
    }
    if (!ids.insert(s.site_id).second) {
      throw TemplateError(path + ".site_id", "duplicate site id");
    }
    if (s.expected_participants < 1) {
      throw TemplateError(path + ".expected_participants", "must be >= 1");
    }
    if (!poas.insert(s.poa_node_id).second) {
      throw TemplateError(path + ".poa_node_id", "sites must use distinct PoAs");
    }
  }
  if (per_stream_kbps <= 0) {
    throw TemplateError("per_stream_kbps", "must be positive");
  }
  if (!(latency_bound_ms > 0)) {
    throw TemplateError("latency_bound_ms", "must be positive");
  }
  if (!(cache_window_s > 0)) {
    throw TemplateError("cache_window_s", "must be positive");
  }
}

int
SliceTemplate::totalParticipants() const
{
  int total = 0;
  for (const auto& s : sites) {
    total += s.expected_participants;
  }
  return total;
}

} // namespace icnslice::orch
