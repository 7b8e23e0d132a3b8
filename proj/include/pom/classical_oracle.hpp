#pragma once

// Exact optimum of the task over preparation-noncontextual ontological
// models. Ontic states are the 2^n deterministic response functions; the
// epistemic weights mu[lambda][delta] are the LP variables.

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "pom/protocol.hpp"

namespace pom::classical {

inline constexpr int kDefaultMaxN = 5;

/// Bob's deterministic answer for every measurement y: answer(y) = bit y of
/// `outputs` (same big-endian order as BitString).
struct ResponseVertex {
  BitString outputs;

  int answer(int y) const { return outputs.bit(y); }
};

std::vector<ResponseVertex> response_vertices(int n);

/// Equality-form LP: maximize objective . x subject to rows, x >= 0.
struct LinearProgram {
  struct Row {
    std::vector<std::pair<std::size_t, mpq_class>> terms;  // (variable, coefficient)
    mpq_class rhs;
  };

  int n = 0;
  std::size_t num_vars = 0;
  std::vector<mpq_class> objective;
  std::vector<Row> rows;
  std::size_t normalization_rows = 0;
  std::size_t parity_rows = 0;

  /// Index of mu[lambda][delta].
  std::size_t var(std::uint32_t lambda, std::uint32_t delta) const {
    return (static_cast<std::size_t>(lambda) << n) + delta;
  }
};

struct LpOptions {
  int max_n = kDefaultMaxN;
  bool parity_constraints = true;
};

/// Throws UnsupportedN outside [2, options.max_n].
LinearProgram build_lp(int n, const LpOptions& options = {});

struct SimplexOptions {
  std::size_t max_bits = 1u << 16;  // per numerator/denominator
  std::size_t max_iterations = 5'000'000;
};

struct SimplexResult {
  mpq_class value;
  std::vector<mpq_class> x;
  std::size_t iterations = 0;
};

/// Two-phase dense-tableau simplex over exact rationals with Bland's rule.
/// Throws NumericOverflow when an entry outgrows options.max_bits,
/// IterationLimit, or InvalidState for infeasible/unbounded programs.
SimplexResult solve_simplex(const LinearProgram& lp, const SimplexOptions& options = {});

class NoncontextualModel {
 public:
  /// weights[lambda][delta] = mu(lambda | P_{x^delta}); shape 2^n x 2^n.
  NoncontextualModel(int n, std::vector<std::vector<mpq_class>> weights);

  static NoncontextualModel uniform(int n);

  int n() const noexcept { return n_; }
  const std::vector<std::vector<mpq_class>>& weights() const noexcept { return weights_; }
  const mpq_class& weight(std::uint32_t lambda, std::uint32_t delta) const { return weights_.at(lambda).at(delta); }

 private:
  int n_;
  std::vector<std::vector<mpq_class>> weights_;
};

struct LPSolution {
  mpq_class value;
  NoncontextualModel model;
  std::size_t iterations = 0;
};

LPSolution solve_exact(const LinearProgram& lp, const SimplexOptions& options = {});

struct ModelReport {
  bool nonnegative = true;
  bool normalized = true;
  bool parity_oblivious = true;
  std::vector<std::string> violations;
  mpq_class value;

  bool feasible() const noexcept { return nonnegative && normalized && parity_oblivious; }
};

/// Exact check of nonnegativity, normalization and every parity equality;
/// also evaluates the success probability the model achieves.
ModelReport verify_model(const NoncontextualModel& model);

/// Success probability of `model` with deterministic responses.
mpq_class model_value(const NoncontextualModel& model);

std::string to_fraction_string(const mpq_class& q);

}  // namespace pom::classical
