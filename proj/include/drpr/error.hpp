#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace drpr {

enum class ErrorCode {
  MalformedLine,
  IndexOutOfRange,
  TooFewPages,
  InvalidProbability,
  DanglingNode,
  NotStochastic,
  NotProbabilityVector,
  DimensionMismatch,
  NotConverged,
  DenseLimitExceeded,
  EnumerationLimitExceeded,
  InvalidAlpha,
  InvalidBeta,
  InvalidArgument,
  InsufficientSamples,
  IoError,
  AuditFailure,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::TooFewPages: return "TooFewPages";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::DanglingNode: return "DanglingNode";
    case ErrorCode::NotStochastic: return "NotStochastic";
    case ErrorCode::NotProbabilityVector: return "NotProbabilityVector";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::DenseLimitExceeded: return "DenseLimitExceeded";
    case ErrorCode::EnumerationLimitExceeded: return "EnumerationLimitExceeded";
    case ErrorCode::InvalidAlpha: return "InvalidAlpha";
    case ErrorCode::InvalidBeta: return "InvalidBeta";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::AuditFailure: return "AuditFailure";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace detail {

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace detail

}  // namespace drpr
