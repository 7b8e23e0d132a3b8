#pragma once

// File formats: strategy JSON, certification report JSON, classical oracle
// JSON, tolerance presets.

#include <cstdint>
#include <string>

#include "pom/classical_oracle.hpp"
#include "pom/json_io.hpp"
#include "pom/selftest.hpp"

namespace pom::io {

/// {"n", "d", "preparations": [matrix...], "measurements": [matrix...],
///  "label", "seed"}
json strategy_to_json(const Strategy& strategy, std::uint64_t seed = 0);

/// Throws ParseError for malformed documents and the structural error codes
/// (InvalidState, InvalidObservable, DimensionMismatch) for invalid content.
Strategy strategy_from_json(const json& j, double tol = kStructuralTol);

Strategy read_strategy(const std::string& path, double tol = kStructuralTol);

/// {success_probability, classical_bound, quantum_bound, parity_residual,
///  pass_flags, ...}
json verify_report_to_json(const Strategy& strategy, const ParityReport& parity, double success,
                           std::uint64_t seed);

json certification_to_json(const selftest::CertificationReport& report, std::uint64_t seed);

/// {n, value_numerator, value_denominator, witness_model, ...}
json lp_solution_to_json(const classical::LPSolution& solution);

/// Applies a JSON map of {"structural"|"certification"|"eigen_classify": value}.
/// Throws ParseError on unknown names or non-positive values.
void apply_tolerance_overrides(ToleranceProfile& profile, const json& overrides);

}  // namespace pom::io
