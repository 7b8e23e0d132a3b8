#include "pom/optimal_strategy.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "pom/error.hpp"

namespace pom::optimal {

int qubit_count(int n) { return n / 2; }  // ceil((n - 1) / 2) for n >= 1

std::vector<ComplexMatrix> canonical_matrices(int n) {
  if (n < 0) throw Error(ErrorCode::UnsupportedN, "negative n");
  if (n == 0) return {};
  if (n == 1) return {identity(1)};
  const Eigen::Index half = Eigen::Index{1} << (qubit_count(n) - 1);
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(n));
  out.push_back(tensor(pauli::z(), identity(half)));
  out.push_back(tensor(pauli::y(), identity(half)));
  for (const ComplexMatrix& inner : canonical_matrices(n - 2)) out.push_back(tensor(pauli::x(), inner));
  return out;
}

CanonicalObservables canonical_observables(int n, int max_n) {
  if (n < 2 || n > max_n) {
    throw Error(ErrorCode::UnsupportedN, "canonical observables need 2 <= n <= " + std::to_string(max_n) +
                                             ", got " + std::to_string(n));
  }
  MeasurementSet set = MeasurementSet::from_matrices(canonical_matrices(n), 0.0);
  const Eigen::Index d = set.dim();
  return {n, qubit_count(n), d, std::move(set)};
}

PreparationEnsemble optimal_preparations(const MeasurementSet& observables, double tol, int max_n) {
  const int n = observables.n();
  if (n < 2 || n > max_n) {
    throw Error(ErrorCode::UnsupportedN, "optimal preparations need 2 <= n <= " + std::to_string(max_n) +
                                             ", got " + std::to_string(n));
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const double r =
          max_abs_entry(anticommutator(observables.observable(a).op(), observables.observable(b).op()).matrix());
      if (r > tol) {
        std::ostringstream msg;
        msg << "{B_" << a + 1 << ", B_" << b + 1 << "} has residual " << r;
        throw Error(ErrorCode::NotAnticommuting, msg.str());
      }
    }
  }
  const Eigen::Index d = observables.dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const std::uint32_t count = 1u << n;
  std::vector<ComplexMatrix> states;
  states.reserve(count);
  for (std::uint32_t delta = 0; delta < count; ++delta) {
    const BitString x = BitString::from_delta(n, delta);
    ComplexMatrix bloch = ComplexMatrix::Zero(d, d);
    for (int y = 0; y < n; ++y) {
      const double sign = x.bit(y) == 0 ? 1.0 : -1.0;
      bloch += sign * observables.observable(y).matrix();
    }
    states.push_back((identity(d) + scale * bloch) / static_cast<double>(d));
  }
  return PreparationEnsemble::from_states(n, std::move(states), std::max(tol, kStructuralTol));
}

Strategy optimal_strategy(int n) {
  CanonicalObservables canon = canonical_observables(n);
  PreparationEnsemble prep = optimal_preparations(canon.observables, 0.0);
  return Strategy(std::move(prep), std::move(canon.observables), "optimal-n" + std::to_string(n));
}

double BlochVector::norm() const {
  double sum = 0.0;
  for (double c : coords) sum += c * c;
  return std::sqrt(sum);
}

BlochVector bloch_vector(const BitString& x) {
  BlochVector v{x.n(), std::vector<double>(static_cast<std::size_t>(x.n()))};
  const double scale = 1.0 / std::sqrt(static_cast<double>(x.n()));
  for (int y = 0; y < x.n(); ++y) v.coords[static_cast<std::size_t>(y)] = x.bit(y) == 0 ? scale : -scale;
  return v;
}

double hypercube_distance_sq(const BitString& a, const BitString& b) {
  if (a.n() != b.n()) throw Error(ErrorCode::DimensionMismatch, "bit strings of different lengths");
  const BlochVector ra = bloch_vector(a);
  const BlochVector rb = bloch_vector(b);
  double sum = 0.0;
  for (std::size_t i = 0; i < ra.coords.size(); ++i) {
    const double diff = ra.coords[i] - rb.coords[i];
    sum += diff * diff;
  }
  return sum;
}

ComplexMatrix haar_unitary(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  ComplexMatrix g(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) g(r, c) = Complex(gauss(rng), gauss(rng));
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& packed = qr.matrixQR();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const Complex rkk = packed(k, k);
    const double mag = std::abs(rkk);
    if (mag > 0.0) q.col(k) *= rkk / mag;
  }
  return q;
}

Strategy embed_and_rotate(const Strategy& strategy, int junk_dim, const ComplexMatrix& unitary) {
  if (junk_dim < 1) throw Error(ErrorCode::DimensionMismatch, "junk dimension must be >= 1");
  const Eigen::Index d = strategy.dim() * junk_dim;
  if (unitary.rows() != d || unitary.cols() != d) {
    throw Error(ErrorCode::DimensionMismatch, "unitary does not match the embedded dimension");
  }
  const ComplexMatrix junk = identity(junk_dim);
  const ComplexMatrix u_adj = unitary.adjoint();

  std::vector<ComplexMatrix> states;
  states.reserve(strategy.preparations().states().size());
  for (const ComplexMatrix& rho : strategy.preparations().states()) {
    states.push_back(unitary * tensor(rho, junk / static_cast<double>(junk_dim)) * u_adj);
  }
  std::vector<ComplexMatrix> obs;
  obs.reserve(static_cast<std::size_t>(strategy.n()));
  for (const DichotomicObservable& b : strategy.measurements().observables()) {
    obs.push_back(unitary * tensor(b.matrix(), junk) * u_adj);
  }
  return Strategy(PreparationEnsemble::from_states(strategy.n(), std::move(states)),
                  MeasurementSet::from_matrices(obs), strategy.label());
}

ScrambleResult scramble(const Strategy& strategy, int junk_dim, std::uint64_t seed) {
  if (junk_dim < 1) throw Error(ErrorCode::DimensionMismatch, "junk dimension must be >= 1");
  ComplexMatrix u = haar_unitary(strategy.dim() * junk_dim, seed);
  Strategy rotated = embed_and_rotate(strategy, junk_dim, u);
  std::ostringstream label;
  label << strategy.label() << " scrambled J=" << junk_dim << " seed=" << seed;
  Strategy relabeled(rotated.preparations(), rotated.measurements(), label.str());
  return {std::move(relabeled), std::move(u), junk_dim, seed};
}

std::vector<ComplexMatrix> direct_sum(const std::vector<ComplexMatrix>& irrep, int plus,
                                      const std::vector<ComplexMatrix>& other, int minus) {
  if (irrep.size() != other.size()) throw Error(ErrorCode::DimensionMismatch, "direct sum of unequal sets");
  if (plus < 0 || minus < 0 || plus + minus == 0) throw Error(ErrorCode::DimensionMismatch, "empty direct sum");
  std::vector<ComplexMatrix> out;
  out.reserve(irrep.size());
  for (std::size_t y = 0; y < irrep.size(); ++y) {
    const Eigen::Index a = irrep[y].rows();
    const Eigen::Index b = other[y].rows();
    const Eigen::Index total = a * plus + b * minus;
    ComplexMatrix m = ComplexMatrix::Zero(total, total);
    Eigen::Index offset = 0;
    for (int k = 0; k < plus; ++k, offset += a) m.block(offset, offset, a, a) = irrep[y];
    for (int k = 0; k < minus; ++k, offset += b) m.block(offset, offset, b, b) = other[y];
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<ComplexMatrix> conjugated(const std::vector<ComplexMatrix>& matrices) {
  std::vector<ComplexMatrix> out;
  out.reserve(matrices.size());
  for (const ComplexMatrix& m : matrices) out.push_back(m.conjugate());
  return out;
}

std::vector<ComplexMatrix> chirality_flipped(const std::vector<ComplexMatrix>& matrices) {
  std::vector<ComplexMatrix> out = matrices;
  if (!out.empty()) out.back() = -out.back();
  return out;
}

}  // namespace pom::optimal
