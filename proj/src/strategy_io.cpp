#include "pom/strategy_io.hpp"

#include "pom/error.hpp"

namespace pom::io {

namespace {

const json& require_field(const json& j, const char* name) {
  if (!j.contains(name)) throw Error(ErrorCode::ParseError, std::string("missing field '") + name + "'");
  return j[name];
}

json real_matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

json strategy_to_json(const Strategy& strategy, std::uint64_t seed) {
  json preps = json::array();
  for (const ComplexMatrix& rho : strategy.preparations().states()) preps.push_back(matrix_to_json(rho));
  json meas = json::array();
  for (const DichotomicObservable& b : strategy.measurements().observables()) meas.push_back(matrix_to_json(b.matrix()));
  return json{{"n", strategy.n()},           {"d", strategy.dim()},   {"preparations", std::move(preps)},
              {"measurements", std::move(meas)}, {"label", strategy.label()}, {"seed", seed}};
}

Strategy strategy_from_json(const json& j, double tol) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "strategy: expected an object");
  const json& jn = require_field(j, "n");
  const json& jd = require_field(j, "d");
  if (!jn.is_number_integer()) throw Error(ErrorCode::ParseError, "n: expected an integer");
  if (!jd.is_number_integer() || jd.get<long long>() < 1) throw Error(ErrorCode::ParseError, "d: expected a positive integer");
  const int n = jn.get<int>();
  const auto d = jd.get<Eigen::Index>();
  if (n < 2 || n > kMaxBitStringLength) throw Error(ErrorCode::UnsupportedN, "n = " + std::to_string(n));

  const json& jp = require_field(j, "preparations");
  const json& jm = require_field(j, "measurements");
  if (!jp.is_array()) throw Error(ErrorCode::ParseError, "preparations: expected an array");
  if (!jm.is_array()) throw Error(ErrorCode::ParseError, "measurements: expected an array");

  std::vector<ComplexMatrix> states;
  states.reserve(jp.size());
  for (std::size_t k = 0; k < jp.size(); ++k) {
    const std::string field = "preparations[" + std::to_string(k) + "]";
    states.push_back(matrix_from_json(jp[k], field));
    if (states.back().rows() != d) throw Error(ErrorCode::ParseError, field + ".dim: expected " + std::to_string(d));
  }
  std::vector<ComplexMatrix> obs;
  obs.reserve(jm.size());
  for (std::size_t k = 0; k < jm.size(); ++k) {
    const std::string field = "measurements[" + std::to_string(k) + "]";
    obs.push_back(matrix_from_json(jm[k], field));
    if (obs.back().rows() != d) throw Error(ErrorCode::ParseError, field + ".dim: expected " + std::to_string(d));
  }
  std::string label;
  if (j.contains("label")) {
    if (!j["label"].is_string()) throw Error(ErrorCode::ParseError, "label: expected a string");
    label = j["label"].get<std::string>();
  }
  return Strategy(PreparationEnsemble::from_states(n, std::move(states), tol), MeasurementSet::from_matrices(obs, tol),
                  std::move(label));
}

Strategy read_strategy(const std::string& path, double tol) { return strategy_from_json(read_json_file(path), tol); }

json verify_report_to_json(const Strategy& strategy, const ParityReport& parity, double success, std::uint64_t seed) {
  const mpq_class cb = classical_bound(strategy.n());
  json per_s = json::object();
  for (const ParityResidual& r : parity.per_s) per_s[r.s.to_string()] = r.residual;
  const bool beats = success > cb.get_d();
  return json{{"n", strategy.n()},
              {"d", strategy.dim()},
              {"label", strategy.label()},
              {"success_probability", success},
              {"classical_bound", cb.get_d()},
              {"classical_bound_exact", classical::to_fraction_string(cb)},
              {"quantum_bound", quantum_bound(strategy.n())},
              {"parity_residual", parity.max_residual},
              {"parity_residuals", std::move(per_s)},
              {"pass_flags", {{"parity_oblivious", parity.passed}, {"exceeds_classical", beats}}},
              {"pass", parity.passed && beats},
              {"seed", seed}};
}

json certification_to_json(const selftest::CertificationReport& report, std::uint64_t seed) {
  json extraction;
  if (report.extraction) {
    const auto& f = *report.extraction;
    extraction = json{{"ok", true},
                      {"unitary", matrix_to_json(f.unitary)},
                      {"m", f.m},
                      {"J", f.junk_dim},
                      {"depth", f.depth},
                      {"sectors", json::array({f.sectors.plus, f.sectors.minus})},
                      {"residuals", f.residuals},
                      {"unitarity_residual", f.unitarity_residual}};
  } else {
    extraction = json{{"ok", false}, {"failure", report.failure_reason}};
  }
  const auto& fl = report.flags;
  return json{{"n", report.n},
              {"d", report.dim},
              {"success_probability", report.success_probability},
              {"classical_bound", report.classical_bound.get_d()},
              {"classical_bound_exact", classical::to_fraction_string(report.classical_bound)},
              {"quantum_bound", report.quantum_bound},
              {"parity_residual", report.parity_residual},
              {"anticommutation_residuals", real_matrix_to_json(report.anticommutation_residuals)},
              {"extraction", std::move(extraction)},
              {"state_map_residuals", report.state_map_residuals},
              {"failure_reason", report.failure_reason},
              {"pass_flags",
               {{"parity_oblivious", fl.parity_oblivious},
                {"exceeds_classical", fl.exceeds_classical},
                {"attains_quantum_bound", fl.attains_quantum_bound},
                {"anticommuting", fl.anticommuting},
                {"measurements_certified", fl.measurements_certified},
                {"states_certified", fl.states_certified}}},
              {"pass", report.passed()},
              {"tolerances",
               {{"structural", report.tolerances.structural},
                {"certification", report.tolerances.certification},
                {"eigen_classify", report.tolerances.eigen_classify}}},
              {"seed", seed}};
}

json lp_solution_to_json(const classical::LPSolution& solution) {
  const int n = solution.model.n();
  json weights = json::array();
  for (const auto& row : solution.model.weights()) {
    json jrow = json::array();
    for (const mpq_class& w : row) jrow.push_back(classical::to_fraction_string(w));
    weights.push_back(std::move(jrow));
  }
  mpq_class v(solution.value);
  v.canonicalize();
  return json{{"n", n},
              {"value", classical::to_fraction_string(v)},
              {"value_numerator", v.get_num().get_str()},
              {"value_denominator", v.get_den().get_str()},
              {"iterations", solution.iterations},
              {"witness_model", {{"rows", "lambda"}, {"columns", "delta"}, {"weights", std::move(weights)}}}};
}

void apply_tolerance_overrides(ToleranceProfile& profile, const json& overrides) {
  if (!overrides.is_object()) throw Error(ErrorCode::ParseError, "tolerance profile: expected an object");
  for (const auto& [name, value] : overrides.items()) {
    if (!value.is_number() || !(value.get<double>() > 0.0)) {
      throw Error(ErrorCode::ParseError, "tolerance '" + name + "' must be a positive number");
    }
    const double v = value.get<double>();
    if (name == "structural") {
      profile.structural = v;
    } else if (name == "certification") {
      profile.certification = v;
    } else if (name == "eigen_classify") {
      profile.eigen_classify = v;
    } else {
      throw Error(ErrorCode::ParseError, "unknown tolerance '" + name + "'");
    }
  }
}

}  // namespace pom::io
