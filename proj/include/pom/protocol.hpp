#pragma once

// The parity-oblivious multiplexing task: inputs, constraint, scoring.

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "pom/operator_core.hpp"

namespace pom {

inline constexpr int kMaxBitStringLength = 30;

/// An n-bit string x^delta. Bits are big-endian: x_1 is the most significant
/// bit of delta, so x^0 = 00..0, x^1 = 00..01 and x^(2^n - 1) = 11..1.
class BitString {
 public:
  static BitString from_delta(int n, std::uint32_t delta);
  /// Parses "011"-style text.
  static BitString from_text(const std::string& bits);

  int n() const noexcept { return n_; }
  std::uint32_t delta() const noexcept { return delta_; }
  std::uint32_t delta_bar() const noexcept { return delta_ ^ mask(); }

  /// x_{y+1}, i.e. zero-based position from the left.
  int bit(int index) const;
  std::vector<int> bits() const;
  BitString complement() const { return BitString(n_, delta_bar()); }
  int weight() const noexcept;
  /// x . s = XOR_i x_i s_i.
  int dot(const BitString& s) const;
  int hamming(const BitString& other) const;
  std::string to_string() const;

  bool operator==(const BitString&) const = default;

 private:
  BitString(int n, std::uint32_t delta) : n_(n), delta_(delta) {}
  std::uint32_t mask() const noexcept { return (n_ == 32) ? ~0u : ((1u << n_) - 1u); }

  int n_;
  std::uint32_t delta_;
};

/// All strings of weight >= 2; each one is an obliviousness constraint.
struct ParitySet {
  int n = 0;
  std::vector<BitString> members;  // ascending delta
};

/// Throws UnsupportedN for n < 2.
ParitySet parity_set(int n);

class PreparationEnsemble {
 public:
  /// Validates every state: Hermitian, trace one, min eigenvalue >= -tol.
  /// `states[delta]` is rho_{x^delta}; there must be exactly 2^n of them.
  static PreparationEnsemble from_states(int n, std::vector<ComplexMatrix> states,
                                         double tol = kStructuralTol);

  int n() const noexcept { return n_; }
  Eigen::Index dim() const noexcept { return states_.front().rows(); }
  const std::vector<ComplexMatrix>& states() const noexcept { return states_; }
  const ComplexMatrix& state(std::uint32_t delta) const { return states_.at(delta); }

 private:
  PreparationEnsemble(int n, std::vector<ComplexMatrix> states) : n_(n), states_(std::move(states)) {}

  int n_;
  std::vector<ComplexMatrix> states_;
};

class MeasurementSet {
 public:
  static MeasurementSet from_observables(std::vector<DichotomicObservable> observables);
  static MeasurementSet from_matrices(const std::vector<ComplexMatrix>& matrices,
                                      double tol = kStructuralTol);

  int n() const noexcept { return static_cast<int>(observables_.size()); }
  Eigen::Index dim() const noexcept { return observables_.front().dim(); }
  const std::vector<DichotomicObservable>& observables() const noexcept { return observables_; }
  /// Zero-based: observable(0) is B_1.
  const DichotomicObservable& observable(int index) const { return observables_.at(index); }

 private:
  explicit MeasurementSet(std::vector<DichotomicObservable> obs) : observables_(std::move(obs)) {}

  std::vector<DichotomicObservable> observables_;
};

class Strategy {
 public:
  /// Throws DimensionMismatch when n or d disagree between components.
  Strategy(PreparationEnsemble preparations, MeasurementSet measurements, std::string label = {});

  int n() const noexcept { return preparations_.n(); }
  Eigen::Index dim() const noexcept { return preparations_.dim(); }
  const PreparationEnsemble& preparations() const noexcept { return preparations_; }
  const MeasurementSet& measurements() const noexcept { return measurements_; }
  const std::string& label() const noexcept { return label_; }

 private:
  PreparationEnsemble preparations_;
  MeasurementSet measurements_;
  std::string label_;
};

/// 1/2 (1 + (-1)^b B).
HermitianOperator projector(int b, const DichotomicObservable& observable);

struct ParityResidual {
  BitString s;
  double residual;
};

struct ParityReport {
  double max_residual = 0.0;
  std::vector<ParityResidual> per_s;
  bool passed = false;
};

/// For each s in the parity set, the max-entry norm of
/// sum_{x.s=0} rho_x - sum_{x.s=1} rho_x.
ParityReport check_parity_oblivious(const PreparationEnsemble& prep, double tol = kStructuralTol);

/// Average over (y, delta) of Tr[rho_{x^delta} Pi^{x^delta_y}_{B_y}].
double success_probability(const Strategy& strategy);

/// 1/2 (1 + 1/n), exact.
mpq_class classical_bound(int n);

/// 1/2 (1 + 1/sqrt(n)).
double quantum_bound(int n);

/// Sum with a fixed pairwise reduction tree.
double pairwise_sum(const std::vector<double>& terms);

}  // namespace pom
