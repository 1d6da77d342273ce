#ifndef FCSPDC_ERROR_HPP
#define FCSPDC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace fcspdc {

enum class ErrorKind {
  OutOfRange,
  UnknownAxis,
  NoPhaseMatch,
  EnergyMismatch,
  DegenerateSlope,
  GridMismatch,
  EmptyBand,
  ZeroAmplitude,
  NonSquareGrid,
  DivisionByZero,
  BelowCutoff,
  InfeasibleConstraints,
  Unachievable,
  InvalidArgument,
  Io,
};

// Exit-code category: input/usage errors map to 2, physics infeasibility to 3.
enum class ErrorCategory { Input, Physics };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  ErrorCategory category() const {
    switch (kind_) {
      case ErrorKind::NoPhaseMatch:
      case ErrorKind::BelowCutoff:
      case ErrorKind::InfeasibleConstraints:
      case ErrorKind::Unachievable:
      case ErrorKind::DegenerateSlope:
        return ErrorCategory::Physics;
      default:
        return ErrorCategory::Input;
    }
  }

 private:
  ErrorKind kind_;
};

const char* to_string(ErrorKind kind);

}  // namespace fcspdc

#endif
