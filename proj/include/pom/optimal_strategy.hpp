#pragma once

// The optimal quantum strategy: mutually anticommuting observables in the
// minimal dimension, the hypercube preparation ensemble, its Bloch geometry,
// and the adversarial scrambler used to exercise certification.

#include <cstdint>
#include <vector>

#include "pom/protocol.hpp"

namespace pom::optimal {

inline constexpr int kMaxCanonicalN = 12;
inline constexpr int kMaxPreparationN = 8;

/// m = ceil((n - 1) / 2), the number of qubit factors of the reference.
int qubit_count(int n);

struct CanonicalObservables {
  int n = 0;
  int m = 0;
  Eigen::Index d_star = 0;
  MeasurementSet observables;
};

/// B'_1 = Z (x) 1, B'_2 = Y (x) 1, B'_y = X (x) B'_{y-2} of the (n-2)-set,
/// bottoming out at the 1x1 identity for a single remaining observable.
/// Entries are exactly 0, +-1, +-i. Throws UnsupportedN outside [2, max_n].
CanonicalObservables canonical_observables(int n, int max_n = kMaxCanonicalN);

/// Raw canonical matrices for any n >= 0 (n = 1 gives {[1]}, n = 0 nothing).
std::vector<ComplexMatrix> canonical_matrices(int n);

/// rho_x = (1/d)(1 + sum_y (-1)^{x_y} B_y / sqrt(n)). Throws
/// NotAnticommuting if some pair {B_y, B_y'} exceeds `tol`.
PreparationEnsemble optimal_preparations(const MeasurementSet& observables, double tol = kStructuralTol,
                                         int max_n = kMaxPreparationN);

/// Canonical observables with their optimal ensemble.
Strategy optimal_strategy(int n);

struct BlochVector {
  int n = 0;
  std::vector<double> coords;

  double norm() const;
};

/// coords[y] = (-1)^{x_y} / sqrt(n).
BlochVector bloch_vector(const BitString& x);

/// |r_a - r_b|^2 from coordinates; equals 4 h / n.
double hypercube_distance_sq(const BitString& a, const BitString& b);

struct ScrambleResult {
  Strategy strategy;
  ComplexMatrix unitary;  // the hidden rotation on dimension d * J
  int junk_dim = 1;
  std::uint64_t seed = 0;
};

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// diagonal of R phase-normalized. Deterministic in `seed`.
ComplexMatrix haar_unitary(Eigen::Index dim, std::uint64_t seed);

/// rho -> U (rho (x) 1_J / J) U^dagger and B -> U (B (x) 1_J) U^dagger for a
/// seeded Haar U.
ScrambleResult scramble(const Strategy& strategy, int junk_dim, std::uint64_t seed);

/// Same embedding for an explicit unitary.
Strategy embed_and_rotate(const Strategy& strategy, int junk_dim, const ComplexMatrix& unitary);

/// Direct sum of `plus` copies of `irrep` and `minus` copies of `other`.
/// Used to build representations with a known sector split.
std::vector<ComplexMatrix> direct_sum(const std::vector<ComplexMatrix>& irrep, int plus,
                                      const std::vector<ComplexMatrix>& other, int minus);

/// Entry-wise complex conjugate of each matrix.
std::vector<ComplexMatrix> conjugated(const std::vector<ComplexMatrix>& matrices);

/// The canonical set with its last generator negated: for odd n this is the
/// irreducible representation inequivalent to the canonical one.
std::vector<ComplexMatrix> chirality_flipped(const std::vector<ComplexMatrix>& matrices);

}  // namespace pom::optimal
