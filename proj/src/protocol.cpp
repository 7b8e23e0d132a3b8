#include "pom/protocol.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "pom/error.hpp"

namespace pom {

namespace {

void require_task_n(int n) {
  if (n < 2 || n > kMaxBitStringLength) {
    throw Error(ErrorCode::UnsupportedN,
                "n = " + std::to_string(n) + " (the task needs n >= 2; the parity set of n = 1 is empty)");
  }
}

// The closed-form bounds do not enumerate strings, so they accept any n >= 2.
void require_bound_n(int n) {
  if (n < 2) throw Error(ErrorCode::UnsupportedN, "n = " + std::to_string(n) + " (the bounds need n >= 2)");
}

double pairwise_sum_range(const double* first, std::size_t count) {
  if (count == 0) return 0.0;
  if (count == 1) return first[0];
  const std::size_t half = count / 2;
  return pairwise_sum_range(first, half) + pairwise_sum_range(first + half, count - half);
}

}  // namespace

BitString BitString::from_delta(int n, std::uint32_t delta) {
  if (n < 1 || n > kMaxBitStringLength) {
    throw Error(ErrorCode::UnsupportedN, "bit string length " + std::to_string(n));
  }
  if (delta >> n) {
    throw Error(ErrorCode::DimensionMismatch,
                "delta " + std::to_string(delta) + " out of range for n = " + std::to_string(n));
  }
  return BitString(n, delta);
}

BitString BitString::from_text(const std::string& bits) {
  std::uint32_t delta = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw Error(ErrorCode::ParseError, "bit string '" + bits + "'");
    delta = (delta << 1) | static_cast<std::uint32_t>(c - '0');
  }
  return from_delta(static_cast<int>(bits.size()), delta);
}

int BitString::bit(int index) const {
  if (index < 0 || index >= n_) throw Error(ErrorCode::DimensionMismatch, "bit index out of range");
  return static_cast<int>((delta_ >> (n_ - 1 - index)) & 1u);
}

std::vector<int> BitString::bits() const {
  std::vector<int> out(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) out[static_cast<std::size_t>(i)] = bit(i);
  return out;
}

int BitString::weight() const noexcept { return std::popcount(delta_); }

int BitString::dot(const BitString& s) const {
  if (s.n_ != n_) throw Error(ErrorCode::DimensionMismatch, "dot product of different lengths");
  return std::popcount(delta_ & s.delta_) & 1;
}

int BitString::hamming(const BitString& other) const {
  if (other.n_ != n_) throw Error(ErrorCode::DimensionMismatch, "hamming distance of different lengths");
  return std::popcount(delta_ ^ other.delta_);
}

std::string BitString::to_string() const {
  std::string out;
  out.reserve(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) out += static_cast<char>('0' + bit(i));
  return out;
}

ParitySet parity_set(int n) {
  require_task_n(n);
  ParitySet set{n, {}};
  const std::uint32_t count = 1u << n;
  set.members.reserve(count - static_cast<std::uint32_t>(n) - 1u);
  for (std::uint32_t delta = 0; delta < count; ++delta) {
    if (std::popcount(delta) >= 2) set.members.push_back(BitString::from_delta(n, delta));
  }
  return set;
}

PreparationEnsemble PreparationEnsemble::from_states(int n, std::vector<ComplexMatrix> states, double tol) {
  require_task_n(n);
  const std::size_t expected = std::size_t{1} << n;
  if (states.size() != expected) {
    std::ostringstream msg;
    msg << "expected " << expected << " states for n = " << n << ", found " << states.size();
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
  const Eigen::Index d = states.front().rows();
  for (std::size_t delta = 0; delta < states.size(); ++delta) {
    const ComplexMatrix& rho = states[delta];
    const std::string where = "state delta=" + std::to_string(delta);
    require_valid(rho);
    if (rho.rows() != d) throw Error(ErrorCode::DimensionMismatch, where + " has a different dimension");
    const double herm = hermiticity_residual(rho);
    if (herm > tol) {
      throw Error(ErrorCode::InvalidState, where + " is not Hermitian (residual " + std::to_string(herm) + ")");
    }
    const double trace = rho.trace().real();
    if (std::abs(trace - 1.0) > tol) {
      std::ostringstream msg;
      msg << where << " has trace " << trace;
      throw Error(ErrorCode::InvalidState, msg.str());
    }
    const double min_eig = eig_hermitian(HermitianOperator::unchecked(rho)).eigenvalues(0);
    if (min_eig < -tol) {
      std::ostringstream msg;
      msg << where << " is not positive semidefinite (min eigenvalue " << min_eig << ")";
      throw Error(ErrorCode::InvalidState, msg.str());
    }
  }
  return PreparationEnsemble(n, std::move(states));
}

MeasurementSet MeasurementSet::from_observables(std::vector<DichotomicObservable> observables) {
  if (observables.empty()) throw Error(ErrorCode::UnsupportedN, "empty measurement set");
  const Eigen::Index d = observables.front().dim();
  for (std::size_t y = 0; y < observables.size(); ++y) {
    if (observables[y].dim() != d) {
      throw Error(ErrorCode::DimensionMismatch, "observable B_" + std::to_string(y + 1) + " has a different dimension");
    }
  }
  return MeasurementSet(std::move(observables));
}

MeasurementSet MeasurementSet::from_matrices(const std::vector<ComplexMatrix>& matrices, double tol) {
  std::vector<DichotomicObservable> obs;
  obs.reserve(matrices.size());
  for (std::size_t y = 0; y < matrices.size(); ++y) {
    try {
      obs.push_back(DichotomicObservable::from_matrix(matrices[y], tol));
    } catch (const Error& e) {
      throw Error(e.code(), "B_" + std::to_string(y + 1) + ": " + e.what());
    }
  }
  return from_observables(std::move(obs));
}

Strategy::Strategy(PreparationEnsemble preparations, MeasurementSet measurements, std::string label)
    : preparations_(std::move(preparations)), measurements_(std::move(measurements)), label_(std::move(label)) {
  if (preparations_.n() != measurements_.n()) {
    throw Error(ErrorCode::DimensionMismatch, "ensemble n = " + std::to_string(preparations_.n()) +
                                                  " but " + std::to_string(measurements_.n()) + " observables");
  }
  if (preparations_.dim() != measurements_.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "states and observables live in different dimensions");
  }
}

HermitianOperator projector(int b, const DichotomicObservable& observable) {
  if (b != 0 && b != 1) throw Error(ErrorCode::DimensionMismatch, "outcome bit must be 0 or 1");
  const double sign = (b == 0) ? 1.0 : -1.0;
  return HermitianOperator::unchecked(0.5 * (identity(observable.dim()) + sign * observable.matrix()));
}

ParityReport check_parity_oblivious(const PreparationEnsemble& prep, double tol) {
  const ParitySet set = parity_set(prep.n());
  ParityReport report;
  report.per_s.reserve(set.members.size());
  for (const BitString& s : set.members) {
    ComplexMatrix diff = ComplexMatrix::Zero(prep.dim(), prep.dim());
    for (std::uint32_t delta = 0; delta < prep.states().size(); ++delta) {
      const BitString x = BitString::from_delta(prep.n(), delta);
      if (x.dot(s) == 0) {
        diff += prep.state(delta);
      } else {
        diff -= prep.state(delta);
      }
    }
    const double r = max_abs_entry(diff);
    report.per_s.push_back({s, r});
    report.max_residual = std::max(report.max_residual, r);
  }
  report.passed = report.max_residual <= tol;
  return report;
}

double success_probability(const Strategy& strategy) {
  const int n = strategy.n();
  const auto& states = strategy.preparations().states();
  std::vector<double> terms;
  terms.reserve(states.size() * static_cast<std::size_t>(n));
  for (std::uint32_t delta = 0; delta < states.size(); ++delta) {
    const BitString x = BitString::from_delta(n, delta);
    const ComplexMatrix& rho = states[delta];
    for (int y = 0; y < n; ++y) {
      const ComplexMatrix& b = strategy.measurements().observable(y).matrix();
      // Tr[rho Pi^b] = 1/2 (Tr rho + (-1)^b Tr[rho B])
      const double expectation = rho.cwiseProduct(b.transpose()).sum().real();
      const double sign = x.bit(y) == 0 ? 1.0 : -1.0;
      terms.push_back(0.5 * (rho.trace().real() + sign * expectation));
    }
  }
  return pairwise_sum(terms) / static_cast<double>(terms.size());
}

mpq_class classical_bound(int n) {
  require_bound_n(n);
  mpq_class value(mpz_class(n + 1), mpz_class(2 * n));
  value.canonicalize();
  return value;
}

double quantum_bound(int n) {
  require_bound_n(n);
  return 0.5 * (1.0 + 1.0 / std::sqrt(static_cast<double>(n)));
}

double pairwise_sum(const std::vector<double>& terms) { return pairwise_sum_range(terms.data(), terms.size()); }

}  // namespace pom
