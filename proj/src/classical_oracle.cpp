#include "pom/classical_oracle.hpp"

#include <bit>
#include <sstream>

#include "pom/error.hpp"

namespace pom::classical {

namespace {

std::size_t bit_size(const mpq_class& q) {
  return std::max(mpz_sizeinbase(q.get_num_mpz_t(), 2), mpz_sizeinbase(q.get_den_mpz_t(), 2));
}

// Objective weight of mu[lambda][delta]: the number of y on which the
// response vertex answers x^delta_y, over 2^n n.
mpq_class objective_coefficient(int n, std::uint32_t lambda, std::uint32_t delta) {
  const int matches = n - std::popcount(lambda ^ delta);
  mpq_class c(mpz_class(matches), mpz_class(static_cast<unsigned long>(n) << n));
  c.canonicalize();
  return c;
}

class Tableau {
 public:
  Tableau(const LinearProgram& lp, const SimplexOptions& options)
      : vars_(lp.num_vars), options_(options), rows_(lp.rows.size()), basis_(lp.rows.size()) {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      rows_[i].assign(vars_ + 1, mpq_class(0));
      for (const auto& [j, coeff] : lp.rows[i].terms) rows_[i][j] += coeff;
      rows_[i][vars_] = lp.rows[i].rhs;
      if (sgn(rows_[i][vars_]) < 0) {
        for (auto& v : rows_[i]) v = -v;
      }
      basis_[i] = vars_ + i;  // artificial
    }
  }

  std::size_t iterations() const noexcept { return iterations_; }

  // Phase 1: maximize -sum(artificials). Returns the optimal phase-1 value.
  mpq_class phase_one() {
    reduced_.assign(vars_ + 1, mpq_class(0));
    for (const auto& row : rows_) {
      for (std::size_t j = 0; j <= vars_; ++j) {
        if (sgn(row[j]) != 0) reduced_[j] += row[j];
      }
    }
    run();
    // reduced_[rhs] carries sum of artificials at the optimum.
    return reduced_[vars_];
  }

  // Pivots basic artificials out (degenerate pivots) and drops redundant rows.
  void drive_out_artificials() {
    for (std::size_t i = 0; i < rows_.size();) {
      if (basis_[i] < vars_) {
        ++i;
        continue;
      }
      std::size_t col = vars_;
      for (std::size_t j = 0; j < vars_; ++j) {
        if (sgn(rows_[i][j]) != 0) {
          col = j;
          break;
        }
      }
      if (col == vars_) {
        rows_.erase(rows_.begin() + static_cast<long>(i));
        basis_.erase(basis_.begin() + static_cast<long>(i));
        continue;
      }
      pivot(i, col);
      ++i;
    }
  }

  void phase_two(const std::vector<mpq_class>& objective) {
    reduced_.assign(vars_ + 1, mpq_class(0));
    for (std::size_t j = 0; j < vars_; ++j) reduced_[j] = objective[j];
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const mpq_class& cb = objective[basis_[i]];
      if (sgn(cb) == 0) continue;
      for (std::size_t j = 0; j <= vars_; ++j) {
        if (sgn(rows_[i][j]) != 0) reduced_[j] -= cb * rows_[i][j];
      }
    }
    run();
  }

  std::vector<mpq_class> solution() const {
    std::vector<mpq_class> x(vars_, mpq_class(0));
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (basis_[i] < vars_) x[basis_[i]] = rows_[i][vars_];
    }
    return x;
  }

 private:
  void run() {
    for (;;) {
      // Bland: lowest-index improving column.
      std::size_t enter = vars_;
      for (std::size_t j = 0; j < vars_; ++j) {
        if (sgn(reduced_[j]) > 0) {
          enter = j;
          break;
        }
      }
      if (enter == vars_) return;

      std::size_t leave = rows_.size();
      mpq_class best_ratio;
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (sgn(rows_[i][enter]) <= 0) continue;
        mpq_class ratio = rows_[i][vars_] / rows_[i][enter];
        if (leave == rows_.size() || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = std::move(ratio);
        }
      }
      if (leave == rows_.size()) throw Error(ErrorCode::InvalidState, "linear program is unbounded");
      pivot(leave, enter);
    }
  }

  void pivot(std::size_t r, std::size_t e) {
    if (++iterations_ > options_.max_iterations) {
      throw Error(ErrorCode::IterationLimit, "simplex exceeded " + std::to_string(options_.max_iterations) + " pivots");
    }
    std::vector<mpq_class>& prow = rows_[r];
    const mpq_class inv = 1 / prow[e];
    nonzero_.clear();
    for (std::size_t j = 0; j <= vars_; ++j) {
      if (sgn(prow[j]) == 0) continue;
      prow[j] *= inv;
      nonzero_.push_back(j);
      if (bit_size(prow[j]) > options_.max_bits) {
        throw Error(ErrorCode::NumericOverflow, "rational entry exceeds " + std::to_string(options_.max_bits) + " bits");
      }
    }
    mpq_class tmp;
    auto eliminate = [&](std::vector<mpq_class>& row) {
      if (sgn(row[e]) == 0) return;
      const mpq_class factor = row[e];
      for (std::size_t j : nonzero_) {
        tmp = factor * prow[j];
        row[j] -= tmp;
      }
    };
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i != r) eliminate(rows_[i]);
    }
    eliminate(reduced_);
    basis_[r] = e;
  }

  std::size_t vars_;
  SimplexOptions options_;
  std::vector<std::vector<mpq_class>> rows_;
  std::vector<std::size_t> basis_;
  std::vector<mpq_class> reduced_;
  std::vector<std::size_t> nonzero_;
  std::size_t iterations_ = 0;
};

}  // namespace

std::vector<ResponseVertex> response_vertices(int n) {
  std::vector<ResponseVertex> out;
  const std::uint32_t count = 1u << n;
  out.reserve(count);
  for (std::uint32_t lambda = 0; lambda < count; ++lambda) out.push_back({BitString::from_delta(n, lambda)});
  return out;
}

LinearProgram build_lp(int n, const LpOptions& options) {
  if (n < 2 || n > options.max_n) {
    throw Error(ErrorCode::UnsupportedN,
                "classical LP supports 2 <= n <= " + std::to_string(options.max_n) + ", got " + std::to_string(n));
  }
  LinearProgram lp;
  lp.n = n;
  const std::uint32_t count = 1u << n;
  lp.num_vars = std::size_t{count} * count;
  lp.objective.resize(lp.num_vars);
  for (std::uint32_t lambda = 0; lambda < count; ++lambda) {
    for (std::uint32_t delta = 0; delta < count; ++delta) {
      lp.objective[lp.var(lambda, delta)] = objective_coefficient(n, lambda, delta);
    }
  }

  for (std::uint32_t delta = 0; delta < count; ++delta) {
    LinearProgram::Row row;
    for (std::uint32_t lambda = 0; lambda < count; ++lambda) row.terms.emplace_back(lp.var(lambda, delta), 1);
    row.rhs = 1;
    lp.rows.push_back(std::move(row));
  }
  lp.normalization_rows = count;

  if (options.parity_constraints) {
    const ParitySet set = parity_set(n);
    for (const BitString& s : set.members) {
      for (std::uint32_t lambda = 0; lambda < count; ++lambda) {
        LinearProgram::Row row;
        for (std::uint32_t delta = 0; delta < count; ++delta) {
          const int parity = BitString::from_delta(n, delta).dot(s);
          row.terms.emplace_back(lp.var(lambda, delta), parity == 0 ? 1 : -1);
        }
        row.rhs = 0;
        lp.rows.push_back(std::move(row));
      }
    }
    lp.parity_rows = set.members.size() * count;
  }
  return lp;
}

SimplexResult solve_simplex(const LinearProgram& lp, const SimplexOptions& options) {
  Tableau tableau(lp, options);
  const mpq_class infeasibility = tableau.phase_one();
  if (sgn(infeasibility) != 0) throw Error(ErrorCode::InvalidState, "linear program is infeasible");
  tableau.drive_out_artificials();
  tableau.phase_two(lp.objective);

  SimplexResult result;
  result.x = tableau.solution();
  result.value = 0;
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    if (sgn(result.x[j]) != 0) result.value += lp.objective[j] * result.x[j];
  }
  result.iterations = tableau.iterations();
  return result;
}

NoncontextualModel::NoncontextualModel(int n, std::vector<std::vector<mpq_class>> weights)
    : n_(n), weights_(std::move(weights)) {
  const std::size_t count = std::size_t{1} << n;
  if (n < 2 || n > kMaxBitStringLength) throw Error(ErrorCode::UnsupportedN, "model n = " + std::to_string(n));
  if (weights_.size() != count) throw Error(ErrorCode::DimensionMismatch, "model needs 2^n ontic rows");
  for (const auto& row : weights_) {
    if (row.size() != count) throw Error(ErrorCode::DimensionMismatch, "model needs 2^n preparation columns");
  }
}

NoncontextualModel NoncontextualModel::uniform(int n) {
  const std::size_t count = std::size_t{1} << n;
  mpq_class w(mpz_class(1), mpz_class(static_cast<unsigned long>(count)));
  return NoncontextualModel(n, std::vector<std::vector<mpq_class>>(count, std::vector<mpq_class>(count, w)));
}

LPSolution solve_exact(const LinearProgram& lp, const SimplexOptions& options) {
  SimplexResult raw = solve_simplex(lp, options);
  const std::uint32_t count = 1u << lp.n;
  std::vector<std::vector<mpq_class>> weights(count, std::vector<mpq_class>(count));
  for (std::uint32_t lambda = 0; lambda < count; ++lambda) {
    for (std::uint32_t delta = 0; delta < count; ++delta) weights[lambda][delta] = raw.x[lp.var(lambda, delta)];
  }
  return {raw.value, NoncontextualModel(lp.n, std::move(weights)), raw.iterations};
}

mpq_class model_value(const NoncontextualModel& model) {
  const std::uint32_t count = 1u << model.n();
  mpq_class value = 0;
  for (std::uint32_t lambda = 0; lambda < count; ++lambda) {
    for (std::uint32_t delta = 0; delta < count; ++delta) {
      const mpq_class& w = model.weight(lambda, delta);
      if (sgn(w) != 0) value += w * objective_coefficient(model.n(), lambda, delta);
    }
  }
  return value;
}

ModelReport verify_model(const NoncontextualModel& model) {
  ModelReport report;
  const int n = model.n();
  const std::uint32_t count = 1u << n;
  for (std::uint32_t lambda = 0; lambda < count; ++lambda) {
    for (std::uint32_t delta = 0; delta < count; ++delta) {
      if (sgn(model.weight(lambda, delta)) < 0) {
        report.nonnegative = false;
        report.violations.push_back("negative weight at lambda=" + std::to_string(lambda) +
                                    " delta=" + std::to_string(delta));
      }
    }
  }
  for (std::uint32_t delta = 0; delta < count; ++delta) {
    mpq_class total = 0;
    for (std::uint32_t lambda = 0; lambda < count; ++lambda) total += model.weight(lambda, delta);
    if (total != 1) {
      report.normalized = false;
      report.violations.push_back("weights for delta=" + std::to_string(delta) + " sum to " + to_fraction_string(total));
    }
  }
  for (const BitString& s : parity_set(n).members) {
    for (std::uint32_t lambda = 0; lambda < count; ++lambda) {
      mpq_class diff = 0;
      for (std::uint32_t delta = 0; delta < count; ++delta) {
        if (BitString::from_delta(n, delta).dot(s) == 0) {
          diff += model.weight(lambda, delta);
        } else {
          diff -= model.weight(lambda, delta);
        }
      }
      if (sgn(diff) != 0) {
        report.parity_oblivious = false;
        report.violations.push_back("parity s=" + s.to_string() + " violated at lambda=" + std::to_string(lambda));
      }
    }
  }
  report.value = model_value(model);
  return report;
}

std::string to_fraction_string(const mpq_class& q) {
  mpq_class c(q);
  c.canonicalize();
  return c.get_str();
}

}  // namespace pom::classical
