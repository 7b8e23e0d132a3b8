#pragma once

// Device-independent certification: recursively builds a unitary U with
// U B_y U^dagger = B'_y (x) 1_J for black-box anticommuting observables and
// checks the states against the reference ensemble.
//
// Each level works in a basis where the first remaining observable is
// Z (x) 1. Anticommutation forces the others off-diagonal,
//     [ 0    X_y ]
//     [ X_y^ 0   ],
// and diag(1, i X_2) rotates the second one to Y (x) 1 while the rest become
// X (x) (-i X_y X_2^dagger). The reduced operators form the next level on
// half the dimension. With a single observable left (odd n) the reduced
// operator C is dichotomic but not necessarily +-1; its eigenspaces give the
// sector split (J+, J-), J- counting blocks that carry the inequivalent
// irreducible representation (the complex-conjugate one for n = 3 mod 4).

#include <optional>
#include <string>
#include <vector>

#include "pom/protocol.hpp"

namespace pom::selftest {

/// Halves of an even-dimensional matrix in the 2 x (d/2) block basis.
struct BlockSplit {
  ComplexMatrix top_left;
  ComplexMatrix top_right;
  ComplexMatrix bottom_left;
  ComplexMatrix bottom_right;

  ComplexMatrix reassemble() const;
};

/// Throws DimensionMismatch for odd dimension.
BlockSplit split_blocks(const ComplexMatrix& m);

struct DiagonalizingStep {
  ComplexMatrix unitary;  // U1 with U1 B1 U1^dagger = diag(1, -1) blocks
  Eigen::Index half_dim = 0;
};

/// Rotates a dichotomic B1 to diag(1_{d/2}, -1_{d/2}), +1 eigenvectors
/// first. Throws NonDichotomic when an eigenvalue is not within
/// `eigen_classify` of +-1, UnbalancedSpectrum when multiplicities differ.
DiagonalizingStep diagonalizing_step(const HermitianOperator& b1, const ToleranceProfile& tol = {});

/// Top-right block X of an observable already rotated into B1's eigenbasis.
/// Throws DiagonalLeakage if a diagonal block, or the mismatch between the
/// bottom-left block and X^dagger, exceeds `tol`.
ComplexMatrix offdiagonal_block(const HermitianOperator& rotated, double tol = kCertificationTol);

/// diag(1, i X2). Throws NonUnitaryBlock unless X2 is unitary within `tol`.
ComplexMatrix second_step_unitary(const ComplexMatrix& x2, double tol = kCertificationTol);

/// -i X_y X2^dagger for every block in `blocks` (observables 3..n of the
/// current level). Throws AnticommutationLost when a block breaks
/// anticommutation with B_2 or the reduced set is not a Clifford set, and
/// HermiticityLost if a reduced operator is not Hermitian. `first_label` is
/// the observable number of blocks[0], used in diagnostics.
std::vector<HermitianOperator> reduce_observables(const std::vector<ComplexMatrix>& blocks, const ComplexMatrix& x2,
                                                  double tol = kCertificationTol, int first_label = 3);

struct SectorSignature {
  Eigen::Index plus = 0;
  Eigen::Index minus = 0;
};

struct UnitaryFactorization {
  ComplexMatrix unitary;
  int n = 0;
  int m = 0;
  Eigen::Index junk_dim = 0;
  std::vector<ComplexMatrix> canonical;  // B'_y on 2^m dimensions
  std::vector<double> residuals;         // per observable, max-entry
  SectorSignature sectors;
  int depth = 0;
  double unitarity_residual = 0.0;

  /// Diagonal of the junk-space sign operator: plus entries of +1 first.
  std::vector<int> sector_signs() const;

  /// B'_y (x) S_y, where S_y = diag(signs) for the last observable of odd n
  /// and the identity otherwise. `y` is zero-based.
  ComplexMatrix reference_observable(int y, const std::vector<int>& signs) const;
  ComplexMatrix reference_observable(int y) const { return reference_observable(y, sector_signs()); }

  /// (1/(d' J)) (1 + sum_y (-1)^{x_y} B'_y (x) S_y / sqrt(n)).
  ComplexMatrix reference_state(const BitString& x) const;
};

/// max_y |U B_y U^dagger - reference_y| against an arbitrary sign vector.
std::vector<double> observable_residuals(const MeasurementSet& ms, const UnitaryFactorization& fact,
                                         const std::vector<int>& signs);

/// Full recursion. Throws DimensionNotDivisible, AnticommutationLost,
/// UnbalancedSpectrum, NonDichotomic, propagated step errors, and
/// ResidualExceeded if the final residuals exceed `tol.certification`.
UnitaryFactorization extract_unitary(const MeasurementSet& ms, const ToleranceProfile& tol = {});

/// Per-delta |U rho U^dagger - reference state|_max.
std::vector<double> certify_states(const PreparationEnsemble& prep, const UnitaryFactorization& fact);

/// Entry (y, y') = |{B_y, B_y'} - 2 delta_{yy'} 1|_max.
Eigen::MatrixXd anticommutation_residuals(const MeasurementSet& ms);

struct PassFlags {
  bool parity_oblivious = false;
  bool exceeds_classical = false;
  bool attains_quantum_bound = false;
  bool anticommuting = false;
  bool measurements_certified = false;
  bool states_certified = false;
};

struct CertificationReport {
  int n = 0;
  Eigen::Index dim = 0;
  double success_probability = 0.0;
  mpq_class classical_bound;
  double quantum_bound = 0.0;
  double parity_residual = 0.0;
  Eigen::MatrixXd anticommutation_residuals;
  std::optional<UnitaryFactorization> extraction;
  std::string failure_reason;
  std::vector<double> state_map_residuals;
  PassFlags flags;
  ToleranceProfile tolerances;

  bool passed() const noexcept;
};

/// Scores, checks parity obliviousness and anticommutation, extracts the
/// unitary and maps the states. Never throws on certification failure; the
/// report carries the reason.
CertificationReport certify(const Strategy& strategy, const ToleranceProfile& tol = {});

}  // namespace pom::selftest
