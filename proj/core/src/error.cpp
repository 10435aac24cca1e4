#include "qnewton/error.hpp"

namespace qnewton {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kOverflow: return "Overflow";
    case ErrorCode::kNotRepresentable: return "NotRepresentable";
    case ErrorCode::kDegenerateBounds: return "DegenerateBounds";
    case ErrorCode::kBoundViolation: return "BoundViolation";
    case ErrorCode::kEpsilonTooLarge: return "EpsilonTooLarge";
    case ErrorCode::kInitialPointTooFar: return "InitialPointTooFar";
    case ErrorCode::kHessianNotPD: return "HessianNotPD";
    case ErrorCode::kInfeasibleSpec: return "InfeasibleSpec";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace qnewton
