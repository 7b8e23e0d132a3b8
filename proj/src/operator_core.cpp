#include "pom/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "pom/error.hpp"

namespace pom {

void require_valid(const ComplexMatrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    std::ostringstream msg;
    msg << "matrix is " << m.rows() << "x" << m.cols();
    throw Error(ErrorCode::NotSquare, msg.str());
  }
  if (!m.allFinite()) throw Error(ErrorCode::NonFinite, "matrix has NaN or Inf entries");
}

double max_abs_entry(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

double hermiticity_residual(const ComplexMatrix& m) {
  return max_abs_entry(m - m.adjoint());
}

HermitianOperator HermitianOperator::from_matrix(ComplexMatrix m, double tol) {
  require_valid(m);
  const double residual = pom::hermiticity_residual(m);
  if (residual > tol) {
    std::ostringstream msg;
    msg << "hermiticity residual " << residual << " exceeds " << tol;
    throw Error(ErrorCode::ResidualExceeded, msg.str());
  }
  return HermitianOperator(std::move(m), residual);
}

HermitianOperator HermitianOperator::unchecked(ComplexMatrix m) {
  require_valid(m);
  const double residual = pom::hermiticity_residual(m);
  return HermitianOperator(std::move(m), residual);
}

DichotomicObservable DichotomicObservable::from_operator(HermitianOperator op, double tol) {
  const ComplexMatrix& b = op.matrix();
  const double sq = max_abs_entry(b * b - identity(b.rows()));
  const double tr = std::abs(b.trace());
  if (sq > tol || tr > tol) {
    std::ostringstream msg;
    msg << "not a traceless dichotomic observable (|B^2 - 1| = " << sq << ", |Tr B| = " << tr
        << ", tol " << tol << ")";
    throw Error(ErrorCode::InvalidObservable, msg.str());
  }
  return DichotomicObservable(std::move(op), sq, tr);
}

DichotomicObservable DichotomicObservable::from_matrix(const ComplexMatrix& m, double tol) {
  return from_operator(HermitianOperator::from_matrix(m, tol), tol);
}

HermitianOperator anticommutator(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) {
    std::ostringstream msg;
    msg << "anticommutator of " << a.dim() << "- and " << b.dim() << "-dimensional operators";
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
  ComplexMatrix ab = a.matrix() * b.matrix();
  ComplexMatrix ba = b.matrix() * a.matrix();
  return HermitianOperator::unchecked(ab + ba);
}

EigenDecomposition eig_hermitian(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::EigenFailure, "Hermitian eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double operator_norm(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::EigenFailure, "Hermitian eigensolver did not converge");
  }
  const RealVector& ev = solver.eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

UnitarityCheck is_unitary(const ComplexMatrix& u, double tol) {
  if (u.rows() != u.cols()) return {false, std::numeric_limits<double>::infinity()};
  const double residual = max_abs_entry(u.adjoint() * u - identity(u.rows()));
  return {residual <= tol, residual};
}

ComplexMatrix identity(Eigen::Index dim) { return ComplexMatrix::Identity(dim, dim); }

namespace pauli {

ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return m;
}

ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

}  // namespace pauli

}  // namespace pom
