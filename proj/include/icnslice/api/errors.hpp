#ifndef ICNSLICE_API_ERRORS_HPP
#define ICNSLICE_API_ERRORS_HPP

#include "json.hpp"

#include <exception>
#include <stdexcept>
#include <string>

namespace icnslice::api {

/// An error as the management plane reports it: HTTP status plus a stable code.
class ApiError : public std::runtime_error
{
public:
  ApiError(int status, std::string code, const std::string& message,
           nlohmann::json detail = nlohmann::json::object())
    : std::runtime_error(message)
    , m_status(status)
    , m_code(std::move(code))
    , m_detail(std::move(detail))
  {
  }

  int
  status() const
  {
    return m_status;
  }

  const std::string&
  code() const
  {
    return m_code;
  }

  const nlohmann::json&
  detail() const
  {
    return m_detail;
  }

  nlohmann::json
  toJson() const;

private:
  int m_status;
  std::string m_code;
  nlohmann::json m_detail;
};

/// Maps any exception raised by a command onto exactly one ApiError.
ApiError
classify(std::exception_ptr error);

} // namespace icnslice::api

#endif // ICNSLICE_API_ERRORS_HPP
