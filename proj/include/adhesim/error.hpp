#pragma once

#include <stdexcept>
#include <string>

namespace adhesim {

enum class ErrorKind {
  InvalidParameter,
  NonNormalizable,
  OutOfDomain,
  GridMismatch,
  NonFiniteState,
  StepSizeUnderflow,
  PositivityViolated,
  NotConverged,
  DegenerateMode,
  NewtonDiverged,
  SingularJacobian,
  UnsupportedKernel,
  NonPositiveDensity,
  ParseError,
  UnknownKey,
  UnknownValue,
  RangeError,
  IoError,
};

const char* to_string(ErrorKind kind);

// Configuration errors map to exit code 2, numerical failures to 3.
bool is_config_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace adhesim
