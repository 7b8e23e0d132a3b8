#pragma once

// Dense complex-matrix substrate shared by every other module.

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace pom {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kStructuralTol = 1e-9;
inline constexpr double kCertificationTol = 1e-7;
inline constexpr double kEigenClassifyTol = 1e-6;

/// Tolerances used across certification. Structural checks (Hermiticity,
/// dichotomy, state validity) use `structural`; pass/fail decisions on
/// residuals use `certification`; eigenvalues within `eigen_classify` of
/// +-1 count as +-1.
struct ToleranceProfile {
  double structural = kStructuralTol;
  double certification = kCertificationTol;
  double eigen_classify = kEigenClassifyTol;
};

/// Throws NotSquare / NonFinite unless `m` is a square, non-empty matrix of
/// finite entries.
void require_valid(const ComplexMatrix& m);

double max_abs_entry(const ComplexMatrix& m);

/// max |m - m^dagger| over entries.
double hermiticity_residual(const ComplexMatrix& m);

class HermitianOperator {
 public:
  /// Certifies `m` as Hermitian; throws ResidualExceeded when the largest
  /// entry of m - m^dagger exceeds `tol`.
  static HermitianOperator from_matrix(ComplexMatrix m, double tol = kStructuralTol);

  /// Wraps `m` recording its residual without enforcing a bound. Used for
  /// derived quantities (anticommutators, projectors) of certified inputs.
  static HermitianOperator unchecked(ComplexMatrix m);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }
  double hermiticity_residual() const noexcept { return residual_; }

 private:
  HermitianOperator(ComplexMatrix m, double residual) : matrix_(std::move(m)), residual_(residual) {}

  ComplexMatrix matrix_;
  double residual_;
};

inline HermitianOperator hermitian_from_matrix(const ComplexMatrix& m, double tol = kStructuralTol) {
  return HermitianOperator::from_matrix(m, tol);
}

/// Traceless Hermitian operator with B^2 = 1.
class DichotomicObservable {
 public:
  static DichotomicObservable from_operator(HermitianOperator op, double tol = kStructuralTol);
  static DichotomicObservable from_matrix(const ComplexMatrix& m, double tol = kStructuralTol);

  const HermitianOperator& op() const noexcept { return op_; }
  const ComplexMatrix& matrix() const noexcept { return op_.matrix(); }
  Eigen::Index dim() const noexcept { return op_.dim(); }
  double squared_identity_residual() const noexcept { return squared_identity_residual_; }
  double trace_magnitude() const noexcept { return trace_magnitude_; }

 private:
  DichotomicObservable(HermitianOperator op, double sq, double tr)
      : op_(std::move(op)), squared_identity_residual_(sq), trace_magnitude_(tr) {}

  HermitianOperator op_;
  double squared_identity_residual_;
  double trace_magnitude_;
};

/// AB + BA. Throws DimensionMismatch.
HermitianOperator anticommutator(const HermitianOperator& a, const HermitianOperator& b);

/// Spectral radius through the Hermitian eigendecomposition.
double operator_norm(const HermitianOperator& a);

struct EigenDecomposition {
  RealVector eigenvalues;     // ascending
  ComplexMatrix eigenvectors;  // columns
};

EigenDecomposition eig_hermitian(const HermitianOperator& a);

/// Kronecker product a (x) b.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

struct UnitarityCheck {
  bool unitary = false;
  double residual = 0.0;
};

UnitarityCheck is_unitary(const ComplexMatrix& u, double tol);

ComplexMatrix identity(Eigen::Index dim);

namespace pauli {
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
}  // namespace pauli

}  // namespace pom
