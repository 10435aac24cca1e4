#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qnewton {

enum class ErrorCode {
  kInvalidArgument,
  kRankDeficient,
  kSingularSystem,
  kOverflow,
  kNotRepresentable,
  kDegenerateBounds,
  kBoundViolation,
  kEpsilonTooLarge,
  kInitialPointTooFar,
  kHessianNotPD,
  kInfeasibleSpec,
  kParseError,
  kIoError,
};

// Stable identifier used in machine-readable error reports, e.g. "RankDeficient".
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qnewton
