#include "pom/selftest.hpp"

#include <cmath>
#include <sstream>

#include "pom/error.hpp"
#include "pom/optimal_strategy.hpp"

namespace pom::selftest {

namespace {

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

std::string pair_label(int a, int b) {
  std::ostringstream out;
  out << "(B_" << a << ", B_" << b << ")";
  return out.str();
}

// Eigenvectors of a dichotomic operator, +1 eigenspace first.
struct SignedEigenbasis {
  ComplexMatrix vectors;
  Eigen::Index plus = 0;
  Eigen::Index minus = 0;
};

SignedEigenbasis signed_eigenbasis(const HermitianOperator& op, double classify_tol) {
  const EigenDecomposition eig = eig_hermitian(op);
  const Eigen::Index d = op.dim();
  std::vector<Eigen::Index> plus, minus;
  for (Eigen::Index k = 0; k < d; ++k) {
    const double lambda = eig.eigenvalues(k);
    if (std::abs(lambda - 1.0) <= classify_tol) {
      plus.push_back(k);
    } else if (std::abs(lambda + 1.0) <= classify_tol) {
      minus.push_back(k);
    } else {
      std::ostringstream msg;
      msg << "eigenvalue " << lambda << " is not within " << classify_tol << " of +-1";
      throw Error(ErrorCode::NonDichotomic, msg.str());
    }
  }
  SignedEigenbasis out{ComplexMatrix(d, d), static_cast<Eigen::Index>(plus.size()),
                       static_cast<Eigen::Index>(minus.size())};
  Eigen::Index col = 0;
  for (Eigen::Index k : plus) out.vectors.col(col++) = eig.eigenvectors.col(k);
  for (Eigen::Index k : minus) out.vectors.col(col++) = eig.eigenvectors.col(k);
  return out;
}

struct LevelResult {
  ComplexMatrix unitary;
  SectorSignature sectors;
  int depth = 0;
};

LevelResult extract_level(const std::vector<ComplexMatrix>& ops, Eigen::Index dim, int first_label,
                          const ToleranceProfile& tol) {
  if (ops.empty()) return {identity(dim), {dim, 0}, 0};

  if (ops.size() == 1) {
    const SignedEigenbasis basis =
        signed_eigenbasis(HermitianOperator::unchecked(hermitian_part(ops.front())), tol.eigen_classify);
    return {basis.vectors.adjoint(), {basis.plus, basis.minus}, 0};
  }

  DiagonalizingStep step;
  try {
    step = diagonalizing_step(HermitianOperator::unchecked(hermitian_part(ops.front())), tol);
  } catch (const Error& e) {
    throw Error(e.code(), "level starting at B_" + std::to_string(first_label) + ": " + e.what());
  }
  const ComplexMatrix& u1 = step.unitary;
  const ComplexMatrix u1_adj = u1.adjoint();

  std::vector<ComplexMatrix> blocks;
  blocks.reserve(ops.size() - 1);
  for (std::size_t y = 1; y < ops.size(); ++y) {
    try {
      blocks.push_back(offdiagonal_block(HermitianOperator::unchecked(u1 * ops[y] * u1_adj), tol.certification));
    } catch (const Error& e) {
      throw Error(e.code(), "B_" + std::to_string(first_label + static_cast<int>(y)) + ": " + e.what());
    }
  }
  const ComplexMatrix u2 = second_step_unitary(blocks.front(), tol.certification);

  const std::vector<ComplexMatrix> rest(blocks.begin() + 1, blocks.end());
  const std::vector<HermitianOperator> reduced =
      reduce_observables(rest, blocks.front(), tol.certification, first_label + 2);
  std::vector<ComplexMatrix> next;
  next.reserve(reduced.size());
  for (const HermitianOperator& r : reduced) next.push_back(r.matrix());

  LevelResult inner = extract_level(next, step.half_dim, first_label + 2, tol);
  return {tensor(identity(2), inner.unitary) * u2 * u1, inner.sectors, inner.depth + 1};
}

}  // namespace

ComplexMatrix BlockSplit::reassemble() const {
  const Eigen::Index h = top_left.rows();
  ComplexMatrix m(2 * h, 2 * h);
  m << top_left, top_right, bottom_left, bottom_right;
  return m;
}

BlockSplit split_blocks(const ComplexMatrix& m) {
  require_valid(m);
  if (m.rows() % 2 != 0) throw Error(ErrorCode::DimensionMismatch, "block split of odd dimension " + std::to_string(m.rows()));
  const Eigen::Index h = m.rows() / 2;
  return {m.topLeftCorner(h, h), m.topRightCorner(h, h), m.bottomLeftCorner(h, h), m.bottomRightCorner(h, h)};
}

DiagonalizingStep diagonalizing_step(const HermitianOperator& b1, const ToleranceProfile& tol) {
  const SignedEigenbasis basis = signed_eigenbasis(b1, tol.eigen_classify);
  if (basis.plus != basis.minus) {
    std::ostringstream msg;
    msg << "+1 multiplicity " << basis.plus << " vs -1 multiplicity " << basis.minus;
    throw Error(ErrorCode::UnbalancedSpectrum, msg.str());
  }
  return {basis.vectors.adjoint(), basis.plus};
}

ComplexMatrix offdiagonal_block(const HermitianOperator& rotated, double tol) {
  const BlockSplit blocks = split_blocks(rotated.matrix());
  const double leak = std::max(max_abs_entry(blocks.top_left), max_abs_entry(blocks.bottom_right));
  const double mismatch = max_abs_entry(blocks.bottom_left - blocks.top_right.adjoint());
  if (leak > tol || mismatch > tol) {
    std::ostringstream msg;
    msg << "diagonal blocks " << leak << ", off-diagonal adjoint mismatch " << mismatch << " (tol " << tol << ")";
    throw Error(ErrorCode::DiagonalLeakage, msg.str());
  }
  return blocks.top_right;
}

ComplexMatrix second_step_unitary(const ComplexMatrix& x2, double tol) {
  const UnitarityCheck check = is_unitary(x2, tol);
  if (!check.unitary) {
    std::ostringstream msg;
    msg << "X_2 unitarity residual " << check.residual << " (tol " << tol << ")";
    throw Error(ErrorCode::NonUnitaryBlock, msg.str());
  }
  const Eigen::Index h = x2.rows();
  ComplexMatrix u2 = ComplexMatrix::Zero(2 * h, 2 * h);
  u2.topLeftCorner(h, h) = identity(h);
  u2.bottomRightCorner(h, h) = Complex(0.0, 1.0) * x2;
  return u2;
}

std::vector<HermitianOperator> reduce_observables(const std::vector<ComplexMatrix>& blocks, const ComplexMatrix& x2,
                                                  double tol, int first_label) {
  const ComplexMatrix x2_adj = x2.adjoint();
  std::vector<HermitianOperator> out;
  out.reserve(blocks.size());
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const ComplexMatrix& xy = blocks[k];
    const int label = first_label + static_cast<int>(k);
    if (xy.rows() != x2.rows() || xy.cols() != x2.cols()) {
      throw Error(ErrorCode::DimensionMismatch, "block of B_" + std::to_string(label));
    }
    // Diagonal blocks of {B_2, B_y} in B_1's eigenbasis.
    const double with_b2 = std::max(max_abs_entry(x2 * xy.adjoint() + xy * x2_adj),
                                    max_abs_entry(x2_adj * xy + xy.adjoint() * x2));
    if (with_b2 > tol) {
      std::ostringstream msg;
      msg << pair_label(first_label - 1, label) << " anticommutation residual " << with_b2;
      throw Error(ErrorCode::AnticommutationLost, msg.str());
    }
    const ComplexMatrix reduced = Complex(0.0, -1.0) * xy * x2_adj;
    const double herm = hermiticity_residual(reduced);
    if (herm > tol) {
      std::ostringstream msg;
      msg << "reduced operator for B_" << label << " has hermiticity residual " << herm;
      throw Error(ErrorCode::HermiticityLost, msg.str());
    }
    out.push_back(HermitianOperator::unchecked(hermitian_part(reduced)));
  }
  for (std::size_t a = 0; a < out.size(); ++a) {
    for (std::size_t b = a; b < out.size(); ++b) {
      ComplexMatrix ac = anticommutator(out[a], out[b]).matrix();
      if (a == b) ac -= 2.0 * identity(ac.rows());
      const double r = max_abs_entry(ac);
      if (r > tol) {
        std::ostringstream msg;
        msg << "reduced " << pair_label(first_label + static_cast<int>(a), first_label + static_cast<int>(b))
            << " Clifford residual " << r;
        throw Error(ErrorCode::AnticommutationLost, msg.str());
      }
    }
  }
  return out;
}

std::vector<int> UnitaryFactorization::sector_signs() const {
  std::vector<int> signs(static_cast<std::size_t>(sectors.plus + sectors.minus), 1);
  for (Eigen::Index k = sectors.plus; k < sectors.plus + sectors.minus; ++k) signs[static_cast<std::size_t>(k)] = -1;
  return signs;
}

ComplexMatrix UnitaryFactorization::reference_observable(int y, const std::vector<int>& signs) const {
  const ComplexMatrix& canon = canonical.at(static_cast<std::size_t>(y));
  const bool signed_generator = (n % 2 == 1) && (y == n - 1);
  if (!signed_generator) return tensor(canon, identity(junk_dim));
  if (static_cast<Eigen::Index>(signs.size()) != junk_dim) {
    throw Error(ErrorCode::DimensionMismatch, "sign vector length differs from junk dimension");
  }
  ComplexMatrix s = ComplexMatrix::Zero(junk_dim, junk_dim);
  for (Eigen::Index k = 0; k < junk_dim; ++k) s(k, k) = static_cast<double>(signs[static_cast<std::size_t>(k)]);
  return tensor(canon, s);
}

ComplexMatrix UnitaryFactorization::reference_state(const BitString& x) const {
  if (x.n() != n) throw Error(ErrorCode::DimensionMismatch, "bit string length differs from n");
  const Eigen::Index d = unitary.rows();
  ComplexMatrix bloch = ComplexMatrix::Zero(d, d);
  for (int y = 0; y < n; ++y) bloch += (x.bit(y) == 0 ? 1.0 : -1.0) * reference_observable(y);
  return (identity(d) + bloch / std::sqrt(static_cast<double>(n))) / static_cast<double>(d);
}

std::vector<double> observable_residuals(const MeasurementSet& ms, const UnitaryFactorization& fact,
                                         const std::vector<int>& signs) {
  if (ms.n() != fact.n || ms.dim() != fact.unitary.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "measurement set does not match the factorization");
  }
  const ComplexMatrix u_adj = fact.unitary.adjoint();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(ms.n()));
  for (int y = 0; y < ms.n(); ++y) {
    out.push_back(
        max_abs_entry(fact.unitary * ms.observable(y).matrix() * u_adj - fact.reference_observable(y, signs)));
  }
  return out;
}

Eigen::MatrixXd anticommutation_residuals(const MeasurementSet& ms) {
  const int n = ms.n();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      ComplexMatrix ac = anticommutator(ms.observable(a).op(), ms.observable(b).op()).matrix();
      if (a == b) ac -= 2.0 * identity(ms.dim());
      out(a, b) = out(b, a) = max_abs_entry(ac);
    }
  }
  return out;
}

UnitaryFactorization extract_unitary(const MeasurementSet& ms, const ToleranceProfile& tol) {
  const int n = ms.n();
  if (n < 2) throw Error(ErrorCode::UnsupportedN, "extraction needs n >= 2");
  const int m = optimal::qubit_count(n);
  const Eigen::Index d = ms.dim();
  const Eigen::Index d_ref = Eigen::Index{1} << m;
  if (d % d_ref != 0) {
    std::ostringstream msg;
    msg << "dimension " << d << " is not a multiple of 2^" << m;
    throw Error(ErrorCode::DimensionNotDivisible, msg.str());
  }
  const Eigen::MatrixXd ac = anticommutation_residuals(ms);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (ac(a, b) > tol.certification) {
        std::ostringstream msg;
        msg << pair_label(a + 1, b + 1) << " anticommutation residual " << ac(a, b);
        throw Error(ErrorCode::AnticommutationLost, msg.str());
      }
    }
  }

  std::vector<ComplexMatrix> ops;
  ops.reserve(static_cast<std::size_t>(n));
  for (const DichotomicObservable& b : ms.observables()) ops.push_back(b.matrix());
  LevelResult level = extract_level(ops, d, 1, tol);

  UnitaryFactorization fact;
  fact.unitary = std::move(level.unitary);
  fact.n = n;
  fact.m = m;
  fact.junk_dim = d / d_ref;
  fact.canonical = optimal::canonical_matrices(n);
  fact.sectors = level.sectors;
  fact.depth = level.depth;
  fact.unitarity_residual = is_unitary(fact.unitary, tol.certification).residual;
  fact.residuals = observable_residuals(ms, fact, fact.sector_signs());

  for (int y = 0; y < n; ++y) {
    const double r = fact.residuals[static_cast<std::size_t>(y)];
    if (r > tol.certification) {
      std::ostringstream msg;
      msg << "B_" << y + 1 << " maps to its reference with residual " << r;
      throw Error(ErrorCode::ResidualExceeded, msg.str());
    }
  }
  return fact;
}

std::vector<double> certify_states(const PreparationEnsemble& prep, const UnitaryFactorization& fact) {
  if (prep.n() != fact.n || prep.dim() != fact.unitary.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "ensemble does not match the factorization");
  }
  const ComplexMatrix u_adj = fact.unitary.adjoint();
  std::vector<double> out;
  out.reserve(prep.states().size());
  for (std::uint32_t delta = 0; delta < prep.states().size(); ++delta) {
    const ComplexMatrix ref = fact.reference_state(BitString::from_delta(prep.n(), delta));
    out.push_back(max_abs_entry(fact.unitary * prep.state(delta) * u_adj - ref));
  }
  return out;
}

bool CertificationReport::passed() const noexcept {
  return flags.parity_oblivious && flags.exceeds_classical && flags.attains_quantum_bound && flags.anticommuting &&
         flags.measurements_certified && flags.states_certified;
}

CertificationReport certify(const Strategy& strategy, const ToleranceProfile& tol) {
  CertificationReport report;
  report.tolerances = tol;
  report.n = strategy.n();
  report.dim = strategy.dim();
  report.success_probability = success_probability(strategy);
  report.classical_bound = classical_bound(strategy.n());
  report.quantum_bound = quantum_bound(strategy.n());

  const ParityReport parity = check_parity_oblivious(strategy.preparations(), tol.certification);
  report.parity_residual = parity.max_residual;
  report.flags.parity_oblivious = parity.passed;
  report.flags.exceeds_classical = report.success_probability > report.classical_bound.get_d() + tol.certification;
  report.flags.attains_quantum_bound = report.success_probability >= report.quantum_bound - tol.certification;

  report.anticommutation_residuals = anticommutation_residuals(strategy.measurements());
  report.flags.anticommuting = report.anticommutation_residuals.maxCoeff() <= tol.certification;

  try {
    report.extraction = extract_unitary(strategy.measurements(), tol);
    report.flags.measurements_certified = true;
  } catch (const Error& e) {
    report.failure_reason = e.what();
    return report;
  }
  // States are only meaningful once the measurements are pinned down.
  report.state_map_residuals = certify_states(strategy.preparations(), *report.extraction);
  double worst = 0.0;
  for (double r : report.state_map_residuals) worst = std::max(worst, r);
  report.flags.states_certified = worst <= tol.certification;
  if (!report.flags.states_certified) {
    std::ostringstream msg;
    msg << "state map residual " << worst << " exceeds " << tol.certification;
    report.failure_reason = msg.str();
  }
  return report;
}

}  // namespace pom::selftest
