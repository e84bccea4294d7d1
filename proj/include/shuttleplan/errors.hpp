#pragma once

#include <stdexcept>
#include <string>

namespace shuttleplan {

// Base error for all planning failures. `code` is a stable machine-readable
// reason (snake_case) that the service layer forwards to clients.
class PlanError : public std::runtime_error {
 public:
  PlanError(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Raised when an input file cannot be interpreted at all (bad header, bad
// JSON). Row-level problems are reported as rejects instead.
class FormatError : public PlanError {
 public:
  explicit FormatError(const std::string& message)
      : PlanError("malformed_input", message) {}
};

}  // namespace shuttleplan
