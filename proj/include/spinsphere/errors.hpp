#pragma once

#include <stdexcept>
#include <string>

namespace spinsphere {

enum class ErrorCode {
  kNonUnitBivector,
  kNonUnitRotor,
  kDomainError,
  kSingularMatrix,
  kChartDegeneracy,
  kStepOutOfRange,
  kInvalidConfig,
  kTooFewTrials,
  kZeroDispersion,
  kNonConvergentSequence,
  kOptimizerBudgetExceeded,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonUnitBivector: return "NonUnitBivector";
    case ErrorCode::kNonUnitRotor: return "NonUnitRotor";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kSingularMatrix: return "SingularMatrix";
    case ErrorCode::kChartDegeneracy: return "ChartDegeneracy";
    case ErrorCode::kStepOutOfRange: return "StepOutOfRange";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kTooFewTrials: return "TooFewTrials";
    case ErrorCode::kZeroDispersion: return "ZeroDispersion";
    case ErrorCode::kNonConvergentSequence: return "NonConvergentSequence";
    case ErrorCode::kOptimizerBudgetExceeded: return "OptimizerBudgetExceeded";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace spinsphere
