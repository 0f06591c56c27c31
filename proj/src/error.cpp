#include "adhesim/error.hpp"

namespace adhesim {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::NonNormalizable: return "NonNormalizable";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::PositivityViolated: return "PositivityViolated";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::DegenerateMode: return "DegenerateMode";
    case ErrorKind::NewtonDiverged: return "NewtonDiverged";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::UnsupportedKernel: return "UnsupportedKernel";
    case ErrorKind::NonPositiveDensity: return "NonPositiveDensity";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnknownKey: return "UnknownKey";
    case ErrorKind::UnknownValue: return "UnknownValue";
    case ErrorKind::RangeError: return "RangeError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Error";
}

bool is_config_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter:
    case ErrorKind::NonNormalizable:
    case ErrorKind::ParseError:
    case ErrorKind::UnknownKey:
    case ErrorKind::UnknownValue:
    case ErrorKind::RangeError:
    case ErrorKind::IoError:
    case ErrorKind::UnsupportedKernel:
      return true;
    default:
      return false;
  }
}

}  // namespace adhesim
