#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sta {

enum class ErrorCode {
  // validation
  NonPositiveFrequency,
  NonPositiveDuration,
  NonPositiveTarget,
  ViscosityInWrongRegime,
  NegativeViscosity,
  NonPositiveMass,
  NonPositiveEnergy,
  NonPositiveSize,
  NonPositiveVirial,
  NonFiniteValue,
  InvalidConfig,
  RegimeMismatch,
  // protocol / numerics
  FrequencyCrossesZero,
  NotIsotropicShape,
  NotIsotropic,
  ScaleFactorNonPositive,
  ScaleFactorCollapse,
  StepSizeUnderflow,
  // imaging
  GridTooNarrow,
  TooFewSamples,
  DegenerateProfile,
  FitDiverged,
  IoError,
};

enum class ErrorKind { Validation, Numerical };

std::string_view to_string(ErrorCode code);
ErrorKind kind_of(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return kind_of(code_); }

 private:
  ErrorCode code_;
};

struct Violation {
  ErrorCode code;
  std::string message;
};

/// Thrown by validate_spec; carries every violated invariant, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations);

  const std::vector<Violation>& violations() const noexcept { return violations_; }
  bool has(ErrorCode code) const noexcept;

 private:
  std::vector<Violation> violations_;
};

}  // namespace sta
