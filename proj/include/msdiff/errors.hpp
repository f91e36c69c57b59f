#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace msdiff {

enum class ErrorCode {
  NonPositiveTotal,
  NegativeConcentration,
  BadDimension,
  AsymmetricD,
  NonPositiveD,
  DegenerateComposition,
  SingularSystem,
  EigSolverFailure,
  NotConvex,
  PositivityViolation,
  MaxStepsExceeded,
  NonMonotoneFlux,
  InvalidReaction,
  ConfigError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveTotal: return "NonPositiveTotal";
    case ErrorCode::NegativeConcentration: return "NegativeConcentration";
    case ErrorCode::BadDimension: return "BadDimension";
    case ErrorCode::AsymmetricD: return "AsymmetricD";
    case ErrorCode::NonPositiveD: return "NonPositiveD";
    case ErrorCode::DegenerateComposition: return "DegenerateComposition";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::EigSolverFailure: return "EigSolverFailure";
    case ErrorCode::NotConvex: return "NotConvex";
    case ErrorCode::PositivityViolation: return "PositivityViolation";
    case ErrorCode::MaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorCode::NonMonotoneFlux: return "NonMonotoneFlux";
    case ErrorCode::InvalidReaction: return "InvalidReaction";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` tells callers what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace msdiff
