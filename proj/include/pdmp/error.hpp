#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pdmp {

enum class ErrorCode {
  MaxStepsExceeded,
  StepUnderflow,
  NonFiniteDerivative,
  OutOfSpan,
  NoSignChange,
  BracketInvalid,
  NegativeRate,
  RateFloorHit,
  BoundViolated,
  EventMissed,
  StreamMismatch,
  InvalidJumpCount,
  EmptyResults,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::NonFiniteDerivative: return "NonFiniteDerivative";
    case ErrorCode::OutOfSpan: return "OutOfSpan";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::BracketInvalid: return "BracketInvalid";
    case ErrorCode::NegativeRate: return "NegativeRate";
    case ErrorCode::RateFloorHit: return "RateFloorHit";
    case ErrorCode::BoundViolated: return "BoundViolated";
    case ErrorCode::EventMissed: return "EventMissed";
    case ErrorCode::StreamMismatch: return "StreamMismatch";
    case ErrorCode::InvalidJumpCount: return "InvalidJumpCount";
    case ErrorCode::EmptyResults: return "EmptyResults";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a code so callers (and the CLI)
/// can report it by name.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return to_string(code_); }

 private:
  ErrorCode code_;
};

}  // namespace pdmp
