#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "pom/error.hpp"
#include "pom/optimal_strategy.hpp"
#include "pom/protocol.hpp"
#include "test_support.hpp"

using namespace pom;
using namespace pom::testing;

namespace {

std::vector<std::string> member_strings(const ParitySet& set) {
  std::vector<std::string> out;
  for (const auto& s : set.members) out.push_back(s.to_string());
  return out;
}

// Score by literally tracing rho against the winning projector built from
// loops, with no shared helpers.
double naive_success(const Strategy& s) {
  const int n = s.n();
  const Eigen::Index d = s.dim();
  double total = 0.0;
  for (std::uint32_t delta = 0; delta < (1u << n); ++delta) {
    for (int y = 0; y < n; ++y) {
      const int want = static_cast<int>((delta >> (n - 1 - y)) & 1u);
      const ComplexMatrix& b = s.measurements().observable(y).matrix();
      ComplexMatrix pi(d, d);
      for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c) pi(r, c) = 0.5 * ((r == c ? 1.0 : 0.0) + (want == 0 ? 1.0 : -1.0) * b(r, c));
      const ComplexMatrix prod = naive_matmul(s.preparations().state(delta), pi);
      for (Eigen::Index k = 0; k < d; ++k) total += prod(k, k).real();
    }
  }
  return total / static_cast<double>((1u << n) * n);
}

ComplexMatrix ket_projector(Eigen::Index d, Eigen::Index k) {
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  m(k, k) = 1.0;
  return m;
}

}  // namespace

TEST(BitString, BigEndianOrdering) {
  EXPECT_EQ(BitString::from_delta(3, 0).to_string(), "000");
  EXPECT_EQ(BitString::from_delta(3, 1).to_string(), "001");
  EXPECT_EQ(BitString::from_delta(3, 7).to_string(), "111");
  const auto x = BitString::from_text("100");
  EXPECT_EQ(x.delta(), 4u);
  EXPECT_EQ(x.bit(0), 1);
  EXPECT_EQ(x.bit(2), 0);
  EXPECT_EQ(x.delta_bar(), 3u);
}

TEST(BitString, ComplementIsAnInvolution) {
  for (int n = 1; n <= 10; ++n) {
    for (std::uint32_t delta = 0; delta < (1u << n); ++delta) {
      const auto x = BitString::from_delta(n, delta);
      ASSERT_EQ(x.complement().complement(), x);
      ASSERT_EQ(x.hamming(x.complement()), n);
    }
  }
}

TEST(BitString, RejectsBadInput) {
  EXPECT_THROW(BitString::from_delta(2, 4), Error);
  EXPECT_THROW(BitString::from_text("01a"), Error);
  EXPECT_THROW(BitString::from_delta(0, 0), Error);
}

TEST(ParitySet, TwoBitsHasSingleMember) {
  EXPECT_EQ(member_strings(parity_set(2)), std::vector<std::string>{"11"});
}

TEST(ParitySet, ThreeBits) {
  EXPECT_EQ(member_strings(parity_set(3)), (std::vector<std::string>{"011", "101", "110", "111"}));
}

TEST(ParitySet, SizeMatchesIndependentEnumeration) {
  for (int n = 2; n <= 10; ++n) {
    // Count weight >= 2 strings by building each one character by character.
    std::set<std::string> oracle;
    for (std::uint32_t v = 0; v < (1u << n); ++v) {
      std::string s;
      int ones = 0;
      for (int i = n - 1; i >= 0; --i) {
        const bool one = (v >> i) & 1u;
        ones += one;
        s += one ? '1' : '0';
      }
      if (ones >= 2) oracle.insert(s);
    }
    const auto set = parity_set(n);
    EXPECT_EQ(set.members.size(), (std::size_t{1} << n) - static_cast<std::size_t>(n) - 1);
    const auto got = member_strings(set);
    EXPECT_EQ(std::set<std::string>(got.begin(), got.end()), oracle);
    for (std::size_t k = 1; k < set.members.size(); ++k) EXPECT_LT(set.members[k - 1].delta(), set.members[k].delta());
  }
}

TEST(ParitySet, SingleBitIsRejected) {
  try {
    parity_set(1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedN);
  }
}

TEST(Projector, PauliZOutcomes) {
  const auto z = DichotomicObservable::from_matrix(pauli::z());
  EXPECT_EQ(max_diff(projector(0, z).matrix(), diag({1.0, 0.0})), 0.0);
  EXPECT_EQ(max_diff(projector(1, z).matrix(), diag({0.0, 1.0})), 0.0);
}

TEST(Projector, PauliXZeroOutcome) {
  ComplexMatrix expected(2, 2);
  expected << 0.5, 0.5, 0.5, 0.5;
  EXPECT_EQ(max_diff(projector(0, DichotomicObservable::from_matrix(pauli::x())).matrix(), expected), 0.0);
}

TEST(Projector, CompleteAndIdempotentForCertifiedObservables) {
  for (int n = 2; n <= 9; ++n) {
    const auto canon = optimal::canonical_observables(n);
    for (const auto& b : canon.observables.observables()) {
      const ComplexMatrix p0 = projector(0, b).matrix();
      const ComplexMatrix p1 = projector(1, b).matrix();
      EXPECT_EQ(max_diff(p0 + p1, identity(b.dim())), 0.0);
      EXPECT_LE(max_diff(naive_matmul(p0, p0), p0), 1e-12);
      EXPECT_LE(max_diff(naive_matmul(p1, p1), p1), 1e-12);
    }
  }
  EXPECT_THROW(projector(2, DichotomicObservable::from_matrix(pauli::z())), Error);
}

TEST(ParityOblivious, OptimalTwoBitEnsembleIsExact) {
  const auto s = optimal::optimal_strategy(2);
  const auto report = check_parity_oblivious(s.preparations());
  EXPECT_EQ(report.max_residual, 0.0);
  EXPECT_TRUE(report.passed);
  const auto& st = s.preparations().states();
  // rho_00 + rho_11 = rho_01 + rho_10 = 2 1/d
  EXPECT_LE(max_diff(st[0] + st[3], identity(2)), 1e-15);
  EXPECT_LE(max_diff(st[1] + st[2], identity(2)), 1e-15);
}

TEST(ParityOblivious, FullyMixedEnsemble) {
  const std::vector<ComplexMatrix> states(4, 0.5 * identity(2));
  const auto report = check_parity_oblivious(PreparationEnsemble::from_states(2, states));
  EXPECT_EQ(report.max_residual, 0.0);
  EXPECT_TRUE(report.passed);
}

TEST(ParityOblivious, BasisStatesViolateWithResidualOne) {
  const std::vector<ComplexMatrix> states{ket_projector(2, 0), ket_projector(2, 0), ket_projector(2, 0),
                                          ket_projector(2, 1)};
  const auto report = check_parity_oblivious(PreparationEnsemble::from_states(2, states));
  EXPECT_DOUBLE_EQ(report.max_residual, 1.0);
  EXPECT_FALSE(report.passed);
  ASSERT_EQ(report.per_s.size(), 1u);
  EXPECT_EQ(report.per_s[0].s.to_string(), "11");
}

TEST(ParityOblivious, ParityClassAveragesCoincideForPassingEnsembles) {
  for (int n = 2; n <= 6; ++n) {
    const auto s = optimal::optimal_strategy(n);
    const auto report = check_parity_oblivious(s.preparations(), 1e-12);
    ASSERT_TRUE(report.passed) << "n = " << n;
    for (const auto& member : parity_set(n).members) {
      ComplexMatrix even = ComplexMatrix::Zero(s.dim(), s.dim());
      ComplexMatrix odd = even;
      for (std::uint32_t delta = 0; delta < (1u << n); ++delta) {
        (BitString::from_delta(n, delta).dot(member) == 0 ? even : odd) += s.preparations().state(delta);
      }
      EXPECT_LE(max_diff(even, odd), 1e-12);
    }
  }
}

TEST(PreparationEnsemble, RejectsInvalidStates) {
  std::vector<ComplexMatrix> states(4, 0.5 * identity(2));
  states[2] = diag({1.5, -0.5});
  try {
    PreparationEnsemble::from_states(2, states);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidState);
    EXPECT_NE(std::string(e.what()).find("delta=2"), std::string::npos);
  }
  states[2] = identity(2);
  EXPECT_THROW(PreparationEnsemble::from_states(2, states), Error);
  states.pop_back();
  EXPECT_THROW(PreparationEnsemble::from_states(2, states), Error);
}

TEST(Strategy, MismatchedComponentsAreRejected) {
  const auto prep = PreparationEnsemble::from_states(2, std::vector<ComplexMatrix>(4, 0.5 * identity(2)));
  const auto three = MeasurementSet::from_matrices({pauli::z(), pauli::x(), pauli::y()});
  EXPECT_THROW(Strategy(prep, three), Error);
  const auto wide = MeasurementSet::from_matrices({diag({1.0, 1.0, -1.0, -1.0}), diag({1.0, -1.0, 1.0, -1.0})});
  EXPECT_THROW(Strategy(prep, wide), Error);
}

TEST(SuccessProbability, FullyMixedIsOneHalf) {
  const auto prep = PreparationEnsemble::from_states(2, std::vector<ComplexMatrix>(4, 0.5 * identity(2)));
  const Strategy s(prep, MeasurementSet::from_matrices({pauli::z(), pauli::x()}));
  EXPECT_DOUBLE_EQ(success_probability(s), 0.5);
}

TEST(SuccessProbability, OptimalTwoAndThreeBits) {
  EXPECT_NEAR(success_probability(optimal::optimal_strategy(2)), 0.8535533906, 1e-10);
  EXPECT_NEAR(success_probability(optimal::optimal_strategy(3)), 0.7886751346, 1e-10);
}

TEST(SuccessProbability, AgreesWithNaiveTrace) {
  for (int n = 2; n <= 6; ++n) {
    const auto s = optimal::optimal_strategy(n);
    EXPECT_NEAR(success_probability(s), naive_success(s), 1e-12) << "n = " << n;
  }
}

TEST(SuccessProbability, InvariantUnderGlobalUnitary) {
  for (int n = 2; n <= 5; ++n) {
    const auto s = optimal::optimal_strategy(n);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const ComplexMatrix u = optimal::haar_unitary(s.dim(), seed * 977 + static_cast<std::uint64_t>(n));
      const auto rotated = optimal::embed_and_rotate(s, 1, u);
      EXPECT_NEAR(success_probability(rotated), success_probability(s), 1e-10);
      EXPECT_NEAR(naive_success(rotated), success_probability(s), 1e-10);
    }
  }
}

TEST(Bounds, ClassicalExactValues) {
  EXPECT_EQ(classical_bound(2), mpq_class(3, 4));
  EXPECT_EQ(classical_bound(3), mpq_class(2, 3));
  EXPECT_EQ(classical_bound(8), mpq_class(9, 16));
  EXPECT_THROW(classical_bound(1), Error);
}

TEST(Bounds, QuantumValues) {
  EXPECT_NEAR(quantum_bound(2), 0.85355339, 1e-8);
  EXPECT_NEAR(quantum_bound(3), 0.78867513, 1e-8);
  EXPECT_DOUBLE_EQ(quantum_bound(4), 0.75);
  EXPECT_NEAR(success_probability(optimal::optimal_strategy(4)), 0.75, 1e-12);
  EXPECT_THROW(quantum_bound(0), Error);
}

TEST(Bounds, QuantumStrictlyExceedsClassicalUpTo64) {
  for (int n = 2; n <= 64; ++n) {
    // Bracket 1/sqrt(n) from below by a rational r with r^2 <= 1/n, then
    // compare (1 + r)/2 with (n + 1)/(2n) exactly.
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(n));
    mpq_class r(inv_sqrt - 1e-9);
    ASSERT_LE(r * r * n, 1);
    const mpq_class lower = (1 + r) / 2;
    EXPECT_GT(lower, classical_bound(n)) << "n = " << n;
    EXPECT_GT(quantum_bound(n) - classical_bound(n).get_d(), 1e-3) << "n = " << n;
  }
}

TEST(PairwiseSum, MatchesExactSumForIntegers) {
  std::vector<double> terms;
  for (int k = 1; k <= 1001; ++k) terms.push_back(k);
  EXPECT_EQ(pairwise_sum(terms), 1001.0 * 1002.0 / 2.0);
  EXPECT_EQ(pairwise_sum({}), 0.0);
}
