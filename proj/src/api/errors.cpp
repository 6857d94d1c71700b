#include "icnslice/api/errors.hpp"
#include "icnslice/api/scenario.hpp"
#include "icnslice/mobility/mobility.hpp"

namespace icnslice::api {

nlohmann::json
ApiError::toJson() const
{
  nlohmann::json j{{"error", m_code}, {"status", m_status}, {"message", what()}};
  if (!m_detail.empty()) {
    j["detail"] = m_detail;
  }
  return j;
}

ApiError
classify(std::exception_ptr error)
{
  try {
    std::rethrow_exception(error);
  }
  catch (const ApiError& e) {
    return e;
  }
  catch (const ScriptError& e) {
    return ApiError(400, "ScriptError", e.what(), {{"line", e.line()}});
  }
  catch (const orch::TemplateError& e) {
    return ApiError(400, "TemplateError", e.what(), {{"field", e.field()}});
  }
  catch (const substrate::SchemaError& e) {
    return ApiError(400, "SchemaError", e.what());
  }
  catch (const substrate::ValidationError& e) {
    return ApiError(400, "ValidationError", e.what());
  }
  catch (const orch::EmbeddingError& e) {
    return ApiError(409, "EmbeddingError", e.what(),
                    {{"reason", orch::toString(e.reason())}, {"constraint", e.detail()}});
  }
  catch (const orch::DuplicateSlice& e) {
    return ApiError(409, "DuplicateSlice", e.what());
  }
  catch (const orch::SliceNotFound& e) {
    return ApiError(404, "UnknownSlice", e.what());
  }
  catch (const conf::UnknownParticipant& e) {
    return ApiError(404, "UnknownParticipant", e.what());
  }
  catch (const conf::DuplicateParticipant& e) {
    return ApiError(409, "DuplicateParticipant", e.what());
  }
  catch (const conf::NotProducer& e) {
    return ApiError(409, "NotProducer", e.what());
  }
  catch (const conf::InvalidParticipant& e) {
    return ApiError(400, "InvalidParticipant", e.what());
  }
  catch (const conf::NoSuchInterface& e) {
    return ApiError(400, "NoSuchInterface", e.what());
  }
  catch (const mob::MobilityDisabled& e) {
    return ApiError(409, "MobilityDisabled", e.what());
  }
  catch (const conf::HandoffInProgress& e) {
    return ApiError(409, "HandoffInProgress", e.what());
  }
  catch (const nlohmann::json::exception& e) {
    return ApiError(400, "BadRequest", e.what());
  }
  catch (const std::invalid_argument& e) {
    return ApiError(400, "BadRequest", e.what());
  }
  catch (const std::exception& e) {
    return ApiError(500, "Internal", e.what());
  }
  catch (...) {
    return ApiError(500, "Internal", "unknown error");
  }
}

} // namespace icnslice::api
