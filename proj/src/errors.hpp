// Error taxonomy shared by all modules. Each exception carries a stable
// numeric code so the C API can translate without string matching.
#pragma once

#include <stdexcept>
#include <string>

namespace ccs {

enum class ErrorCode {
  invalid_argument = 1,
  non_convergence = 2,
  non_finite = 3,
  domain_error = 4,
  pole = 5,
  step_underflow = 6,
  out_of_range = 7,
  below_ground_action = 8,
  not_normalized = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& m) : Error(ErrorCode::invalid_argument, m) {}
};
struct NonConvergence : Error {
  explicit NonConvergence(const std::string& m) : Error(ErrorCode::non_convergence, m) {}
};
struct NonFinite : Error {
  explicit NonFinite(const std::string& m) : Error(ErrorCode::non_finite, m) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& m) : Error(ErrorCode::domain_error, m) {}
};
struct PoleError : Error {
  explicit PoleError(const std::string& m) : Error(ErrorCode::pole, m) {}
};
struct StepUnderflow : Error {
  explicit StepUnderflow(const std::string& m) : Error(ErrorCode::step_underflow, m) {}
};
struct OutOfRange : Error {
  explicit OutOfRange(const std::string& m) : Error(ErrorCode::out_of_range, m) {}
};
struct OutOfAsymptoticRange : OutOfRange {
  explicit OutOfAsymptoticRange(const std::string& m) : OutOfRange(m) {}
};
struct OutOfSupportedRange : OutOfRange {
  explicit OutOfSupportedRange(const std::string& m) : OutOfRange(m) {}
};
struct BelowGroundAction : Error {
  explicit BelowGroundAction(const std::string& m) : Error(ErrorCode::below_ground_action, m) {}
};
struct NotNormalized : Error {
  explicit NotNormalized(const std::string& m) : Error(ErrorCode::not_normalized, m) {}
};

}  // namespace ccs
