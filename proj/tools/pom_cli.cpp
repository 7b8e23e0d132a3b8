// pom: generate, score, bound, scramble and certify strategies for the
// parity-oblivious multiplexing task.
//
// Exit codes: 0 pass, 1 structural or parse error, 2 certified fail.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pom/classical_oracle.hpp"
#include "pom/error.hpp"
#include "pom/json_io.hpp"
#include "pom/optimal_strategy.hpp"
#include "pom/selftest.hpp"
#include "pom/strategy_io.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitError = 1;
constexpr int kExitFail = 2;

struct RunConfig {
  int n = 0;
  int junk_dim = 1;
  std::uint64_t seed = 0;
  bool lp = false;
  bool force = false;
  std::string in_path;
  std::string out_path;
  std::string out_dir;
  double tol_structural = 0.0;
  double tol_certification = 0.0;
  double tol_eigen_classify = 0.0;
};

pom::ToleranceProfile resolve_tolerances(const RunConfig& cfg) {
  pom::ToleranceProfile profile;
  if (const char* preset = std::getenv("POM_TOL_PROFILE"); preset != nullptr && *preset != '\0') {
    pom::io::apply_tolerance_overrides(profile, pom::io::read_json_file(preset));
  }
  pom::io::json flags = pom::io::json::object();
  if (cfg.tol_structural != 0.0) flags["structural"] = cfg.tol_structural;
  if (cfg.tol_certification != 0.0) flags["certification"] = cfg.tol_certification;
  if (cfg.tol_eigen_classify != 0.0) flags["eigen_classify"] = cfg.tol_eigen_classify;
  pom::io::apply_tolerance_overrides(profile, flags);
  return profile;
}

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::uint64_t seed_of(const std::string& path, std::uint64_t fallback) {
  const auto j = pom::io::read_json_file(path);
  if (j.contains("seed") && j["seed"].is_number_unsigned()) return j["seed"].get<std::uint64_t>();
  return fallback;
}

std::string sidecar_path(const std::string& out) {
  std::filesystem::path p(out);
  if (p.extension() == ".json") p.replace_extension();
  return p.string() + ".unitary.json";
}

void write_json(const std::string& path, const pom::io::json& j) {
  pom::io::write_text_file(path, pom::io::canonical_dump(j));
}

int cmd_generate(const RunConfig& cfg) {
  const pom::Strategy s = pom::optimal::optimal_strategy(cfg.n);
  write_json(cfg.out_path, pom::io::strategy_to_json(s, cfg.seed));
  std::cout << "wrote " << cfg.out_path << ": n=" << s.n() << " d=" << s.dim() << "\n"
            << "success " << pom::io::format_double(pom::success_probability(s)) << ", classical "
            << pom::classical::to_fraction_string(pom::classical_bound(s.n())) << ", quantum "
            << pom::io::format_double(pom::quantum_bound(s.n())) << "\n";
  return kExitPass;
}

int cmd_bounds(const RunConfig& cfg) {
  const mpq_class classical = pom::classical_bound(cfg.n);
  const double quantum = pom::quantum_bound(cfg.n);
  const std::string classical_text = pom::classical::to_fraction_string(classical);
  if (!cfg.lp) {
    std::cout << "classical " << classical_text << ", quantum " << fixed6(quantum) << "\n";
    if (!cfg.out_path.empty()) {
      write_json(cfg.out_path, {{"n", cfg.n},
                                {"classical_bound", classical_text},
                                {"quantum_bound", quantum},
                                {"seed", cfg.seed}});
    }
    return kExitPass;
  }
  pom::classical::LpOptions options;
  if (cfg.n > options.max_n) {
    if (!cfg.force) {
      throw pom::Error(pom::ErrorCode::UnsupportedN, "n = " + std::to_string(cfg.n) + " exceeds the LP cap of " +
                                                         std::to_string(options.max_n) + "; pass --force to run it");
    }
    std::cerr << "warning: running the exact LP for n = " << cfg.n
              << " beyond the default cap; this may take a long time and a lot of memory\n";
    options.max_n = cfg.n;
  }
  const auto solution = pom::classical::solve_exact(pom::classical::build_lp(cfg.n, options));
  const bool match = solution.value == classical;
  std::cout << "classical " << classical_text << " (LP: " << pom::classical::to_fraction_string(solution.value) << ", "
            << (match ? "match" : "mismatch") << "), quantum " << fixed6(quantum) << "\n";
  if (!cfg.out_path.empty()) {
    auto j = pom::io::lp_solution_to_json(solution);
    j["classical_bound"] = classical_text;
    j["quantum_bound"] = quantum;
    j["match"] = match;
    j["seed"] = cfg.seed;
    write_json(cfg.out_path, j);
  }
  return match ? kExitPass : kExitFail;
}

int cmd_verify(const RunConfig& cfg) {
  const pom::ToleranceProfile tol = resolve_tolerances(cfg);
  const pom::Strategy s = pom::io::read_strategy(cfg.in_path, tol.structural);
  const pom::ParityReport parity = pom::check_parity_oblivious(s.preparations(), tol.certification);
  const double success = pom::success_probability(s);
  const auto report = pom::io::verify_report_to_json(s, parity, success, seed_of(cfg.in_path, cfg.seed));
  const bool pass = report["pass"].get<bool>();
  std::cout << "n=" << s.n() << " d=" << s.dim() << "\n"
            << "success " << pom::io::format_double(success) << " (classical "
            << report["classical_bound_exact"].get<std::string>() << ", quantum "
            << pom::io::format_double(pom::quantum_bound(s.n())) << ")\n"
            << "parity residual " << pom::io::format_double(parity.max_residual) << "\n"
            << (pass ? "PASS" : "FAIL") << "\n";
  if (!cfg.out_path.empty()) write_json(cfg.out_path, report);
  return pass ? kExitPass : kExitFail;
}

int cmd_scramble(const RunConfig& cfg) {
  const pom::ToleranceProfile tol = resolve_tolerances(cfg);
  const pom::Strategy s = pom::io::read_strategy(cfg.in_path, tol.structural);
  const auto result = pom::optimal::scramble(s, cfg.junk_dim, cfg.seed);
  write_json(cfg.out_path, pom::io::strategy_to_json(result.strategy, cfg.seed));
  const std::string sidecar = sidecar_path(cfg.out_path);
  write_json(sidecar, {{"J", cfg.junk_dim},
                       {"seed", cfg.seed},
                       {"source_d", s.dim()},
                       {"unitary", pom::io::matrix_to_json(result.unitary)}});
  std::cout << "wrote " << cfg.out_path << " (d=" << result.strategy.dim() << ") and " << sidecar << "\n"
            << "success " << pom::io::format_double(pom::success_probability(result.strategy)) << "\n";
  return kExitPass;
}

int cmd_extract(const RunConfig& cfg) {
  const pom::ToleranceProfile tol = resolve_tolerances(cfg);
  const pom::Strategy s = pom::io::read_strategy(cfg.in_path, tol.structural);
  const auto report = pom::selftest::certify(s, tol);
  std::cout << "n=" << report.n << " d=" << report.dim << "\n"
            << "success " << pom::io::format_double(report.success_probability) << " (quantum bound "
            << pom::io::format_double(report.quantum_bound) << ")\n"
            << "parity residual " << pom::io::format_double(report.parity_residual) << "\n"
            << "max anticommutation residual " << pom::io::format_double(report.anticommutation_residuals.maxCoeff())
            << "\n";
  if (report.extraction) {
    const auto& f = *report.extraction;
    double worst_obs = 0.0;
    for (double r : f.residuals) worst_obs = std::max(worst_obs, r);
    double worst_state = 0.0;
    for (double r : report.state_map_residuals) worst_state = std::max(worst_state, r);
    std::cout << "extraction: m=" << f.m << " J=" << f.junk_dim << " depth=" << f.depth << " sectors=("
              << f.sectors.plus << ", " << f.sectors.minus << ")\n"
              << "max observable residual " << pom::io::format_double(worst_obs) << ", max state residual "
              << pom::io::format_double(worst_state) << "\n";
  } else {
    std::cout << "extraction failed: " << report.failure_reason << "\n";
  }
  std::cout << (report.passed() ? "PASS" : "FAIL") << "\n";
  if (!cfg.out_path.empty()) write_json(cfg.out_path, pom::io::certification_to_json(report, seed_of(cfg.in_path, cfg.seed)));
  return report.passed() ? kExitPass : kExitFail;
}

int cmd_geometry(const RunConfig& cfg) {
  if (cfg.n < 2 || cfg.n > 10) {
    throw pom::Error(pom::ErrorCode::UnsupportedN, "geometry supports 2 <= n <= 10, got " + std::to_string(cfg.n));
  }
  std::filesystem::create_directories(cfg.out_dir);
  const std::uint32_t count = 1u << cfg.n;
  const auto fmt = pom::io::format_double;

  std::ostringstream vertices;
  vertices << "delta,bits";
  for (int y = 1; y <= cfg.n; ++y) vertices << ",coord_" << y;
  vertices << ",norm\n";
  for (std::uint32_t delta = 0; delta < count; ++delta) {
    const auto x = pom::BitString::from_delta(cfg.n, delta);
    const auto r = pom::optimal::bloch_vector(x);
    vertices << delta << "," << x.to_string();
    for (double c : r.coords) vertices << "," << fmt(c);
    vertices << "," << fmt(r.norm()) << "\n";
  }

  std::ostringstream pairs;
  pairs << "delta_a,delta_b,hamming,dist_sq,expected_4h_over_n\n";
  for (std::uint32_t a = 0; a < count; ++a) {
    for (std::uint32_t b = a + 1; b < count; ++b) {
      const auto xa = pom::BitString::from_delta(cfg.n, a);
      const auto xb = pom::BitString::from_delta(cfg.n, b);
      const int h = xa.hamming(xb);
      pairs << a << "," << b << "," << h << "," << fmt(pom::optimal::hypercube_distance_sq(xa, xb)) << ","
            << fmt(4.0 * h / cfg.n) << "\n";
    }
  }
  const auto dir = std::filesystem::path(cfg.out_dir);
  pom::io::write_text_file((dir / "vertices.csv").string(), vertices.str());
  pom::io::write_text_file((dir / "distances.csv").string(), pairs.str());
  std::cout << "wrote " << count << " vertices and " << count * (count - 1) / 2 << " pairs to " << cfg.out_dir << "\n";
  return kExitPass;
}

void add_tolerance_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--tol-structural", cfg.tol_structural, "Hermiticity/dichotomy/state validity tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol-certification", cfg.tol_certification, "residual tolerance for pass/fail")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol-eigen-classify", cfg.tol_eigen_classify, "distance from +-1 for eigenvalue classification")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parity-oblivious multiplexing: strategies, bounds and self-testing"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* generate = app.add_subcommand("generate", "write the optimal strategy for n");
  generate->add_option("--n", cfg.n, "number of bits")->required();
  generate->add_option("--out", cfg.out_path, "strategy JSON path")->required();
  generate->add_option("--seed", cfg.seed, "seed recorded in the output");

  auto* bounds = app.add_subcommand("bounds", "print classical and quantum bounds");
  bounds->add_option("--n", cfg.n, "number of bits")->required();
  bounds->add_flag("--lp", cfg.lp, "also run the exact noncontextual LP");
  bounds->add_flag("--force", cfg.force, "allow the LP beyond its default size cap");
  bounds->add_option("--out", cfg.out_path, "optional JSON output");
  bounds->add_option("--seed", cfg.seed, "seed recorded in the output");

  auto* verify = app.add_subcommand("verify", "score a strategy file and check parity obliviousness");
  verify->add_option("--in", cfg.in_path, "strategy JSON")->required();
  verify->add_option("--out", cfg.out_path, "optional report JSON");
  verify->add_option("--seed", cfg.seed, "seed recorded when the input carries none");
  add_tolerance_flags(verify, cfg);

  auto* scramble = app.add_subcommand("scramble", "embed with junk dimension J and rotate by a seeded unitary");
  scramble->add_option("--in", cfg.in_path, "strategy JSON")->required();
  scramble->add_option("--out", cfg.out_path, "scrambled strategy JSON")->required();
  scramble->add_option("--J", cfg.junk_dim, "junk dimension")->check(CLI::PositiveNumber);
  scramble->add_option("--seed", cfg.seed, "RNG seed");
  add_tolerance_flags(scramble, cfg);

  auto* extract = app.add_subcommand("extract", "run the full self-testing certification");
  extract->add_option("--in", cfg.in_path, "strategy JSON")->required();
  extract->add_option("--out", cfg.out_path, "optional certification report JSON");
  extract->add_option("--seed", cfg.seed, "seed recorded when the input carries none");
  add_tolerance_flags(extract, cfg);

  auto* geometry = app.add_subcommand("geometry", "emit Clifford-Bloch vertex and distance CSVs");
  geometry->add_option("--n", cfg.n, "number of bits")->required();
  geometry->add_option("--out-dir", cfg.out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitError;
  }

  try {
    if (generate->parsed()) return cmd_generate(cfg);
    if (bounds->parsed()) return cmd_bounds(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    if (scramble->parsed()) return cmd_scramble(cfg);
    if (extract->parsed()) return cmd_extract(cfg);
    if (geometry->parsed()) return cmd_geometry(cfg);
  } catch (const pom::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
