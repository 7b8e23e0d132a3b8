#include "pom/error.hpp"

namespace pom {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ResidualExceeded: return "ResidualExceeded";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::UnsupportedN: return "UnsupportedN";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::InvalidObservable: return "InvalidObservable";
    case ErrorCode::NotAnticommuting: return "NotAnticommuting";
    case ErrorCode::UnbalancedSpectrum: return "UnbalancedSpectrum";
    case ErrorCode::NonDichotomic: return "NonDichotomic";
    case ErrorCode::DiagonalLeakage: return "DiagonalLeakage";
    case ErrorCode::NonUnitaryBlock: return "NonUnitaryBlock";
    case ErrorCode::HermiticityLost: return "HermiticityLost";
    case ErrorCode::AnticommutationLost: return "AnticommutationLost";
    case ErrorCode::DimensionNotDivisible: return "DimensionNotDivisible";
    case ErrorCode::NumericOverflow: return "NumericOverflow";
    case ErrorCode::IterationLimit: return "IterationLimit";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace pom
