#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pom {

enum class ErrorCode {
  NotSquare,
  NonFinite,
  ResidualExceeded,
  DimensionMismatch,
  EigenFailure,
  UnsupportedN,
  InvalidState,
  InvalidObservable,
  NotAnticommuting,
  UnbalancedSpectrum,
  NonDichotomic,
  DiagonalLeakage,
  NonUnitaryBlock,
  HermiticityLost,
  AnticommutationLost,
  DimensionNotDivisible,
  NumericOverflow,
  IterationLimit,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pom
