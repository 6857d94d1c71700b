#ifndef ICNSLICE_ORCHESTRATOR_SLICE_TEMPLATE_HPP
#define ICNSLICE_ORCHESTRATOR_SLICE_TEMPLATE_HPP

#include "icnslice/common.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace icnslice::orch {

/// Rejected template. field() holds the JSON path of the offending field.
class TemplateError : public std::runtime_error
{
public:
  TemplateError(std::string field, const std::string& message)
    : std::runtime_error(field + ": " + message)
    , m_field(std::move(field))
  {
  }

  const std::string&
  field() const
  {
    return m_field;
  }

private:
  std::string m_field;
};

struct SiteSpec
{
  std::string site_id;
  NodeId poa_node_id;
  int expected_participants = 1;
};

/// SLA-bearing description of a conference slice.
struct SliceTemplate
{
  std::string slice_name;
  std::vector<SiteSpec> sites;
  std::int64_t per_stream_kbps = 0;
  double latency_bound_ms = 0;
  bool mobility_enabled = false;
  double cache_window_s = 10.0;
  // carried, not enforced
  std::string availability;
  std::string security;

  static SliceTemplate
  fromJson(const nlohmann::json& doc);

  nlohmann::json
  toJson() const;

  /// Throws TemplateError naming the first violated constraint.
  void
  validate() const;

  int
  totalParticipants() const;
};

} // namespace icnslice::orch

#endif // ICNSLICE_ORCHESTRATOR_SLICE_TEMPLATE_HPP
