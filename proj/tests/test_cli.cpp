#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "pom/classical_oracle.hpp"
#include "pom/json_io.hpp"
#include "pom/optimal_strategy.hpp"
#include "pom/strategy_io.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace pom;
using pom::io::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

RunResult run(const std::string& args, const std::string& env = {}) {
  const std::string cmd = env + (env.empty() ? "" : " ") + std::string(POM_CLI_PATH) + " " + args + " 2>&1";
  RunResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return result;
  std::array<char, 4096> buffer{};
  while (fgets(buffer.data(), buffer.size(), pipe) != nullptr) result.output += buffer.data();
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("pom_cli_") + info->name() + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write_strategy(const std::string& name, const Strategy& s) {
    io::write_text_file(path(name), io::canonical_dump(io::strategy_to_json(s, 0)));
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, GenerateTwoBits) {
  const auto r = run("generate --n 2 --out " + path("g2.json"));
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("d=2"), std::string::npos);
  EXPECT_NE(r.output.find("success 0.85355339059327"), std::string::npos) << r.output;
  const json j = json::parse(slurp(path("g2.json")));
  EXPECT_EQ(j["n"], 2);
  EXPECT_EQ(j["d"], 2);
  EXPECT_EQ(j["seed"], 0);
}

TEST_F(CliTest, GenerateFiveBitsIsFourDimensional) {
  const auto r = run("generate --n 5 --out " + path("g5.json"));
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(json::parse(slurp(path("g5.json")))["d"], 4);
}

TEST_F(CliTest, GenerateRejectsOneBit) {
  const auto r = run("generate --n 1 --out " + path("g1.json"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.output.find("UnsupportedN"), std::string::npos) << r.output;
  EXPECT_FALSE(fs::exists(path("g1.json")));
}

TEST_F(CliTest, GenerateIsByteIdenticalAcrossRuns) {
  ASSERT_EQ(run("generate --n 4 --seed 9 --out " + path("a.json")).exit_code, 0);
  ASSERT_EQ(run("generate --n 4 --seed 9 --out " + path("b.json")).exit_code, 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_EQ(json::parse(slurp(path("a.json")))["seed"], 9);
}

TEST_F(CliTest, BoundsWithoutLp) {
  const auto r = run("bounds --n 2");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.output, "classical 3/4, quantum 0.853553\n");
}

TEST_F(CliTest, BoundsWithLpThreeBits) {
  const auto r = run("bounds --n 3 --lp");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.output, "classical 2/3 (LP: 2/3, match), quantum 0.788675\n");
}

TEST_F(CliTest, BoundsWithLpFourBitsWritesWitness) {
  const auto r = run("bounds --n 4 --lp --seed 3 --out " + path("lp4.json"));
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("LP: 5/8, match"), std::string::npos) << r.output;
  const json j = json::parse(slurp(path("lp4.json")));
  EXPECT_EQ(j["value_numerator"], "5");
  EXPECT_EQ(j["value_denominator"], "8");
  EXPECT_EQ(j["seed"], 3);
  EXPECT_EQ(j["witness_model"]["weights"].size(), 16u);
}

TEST_F(CliTest, BoundsLpCapNeedsForce) {
  const auto r = run("bounds --n 6 --lp");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.output.find("--force"), std::string::npos) << r.output;
}

TEST_F(CliTest, VerifyGeneratedPasses) {
  ASSERT_EQ(run("generate --n 3 --out " + path("g3.json")).exit_code, 0);
  const auto r = run("verify --in " + path("g3.json") + " --out " + path("v3.json"));
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("PASS"), std::string::npos);
  const json j = json::parse(slurp(path("v3.json")));
  EXPECT_NEAR(j["success_probability"].get<double>(), 0.5 * (1 + 1 / std::sqrt(3.0)), 1e-12);
  EXPECT_TRUE(j["pass_flags"]["parity_oblivious"].get<bool>());
  EXPECT_EQ(j["classical_bound_exact"], "2/3");
}

TEST_F(CliTest, VerifyTraceDefectIsStructural) {
  json j = io::strategy_to_json(optimal::optimal_strategy(2), 0);
  j["preparations"][1] = io::matrix_to_json(0.45 * identity(2));
  io::write_text_file(path("bad.json"), io::canonical_dump(j));
  const auto r = run("verify --in " + path("bad.json"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.output.find("delta=1"), std::string::npos) << r.output;
}

TEST_F(CliTest, VerifyParityDefectIsCertifiedFail) {
  std::vector<ComplexMatrix> states(4, 0.5 * identity(2));
  states[3] = pom::testing::diag({0.7, 0.3});
  const Strategy s(PreparationEnsemble::from_states(2, states),
                   MeasurementSet::from_matrices({pauli::z(), pauli::y()}));
  write_strategy("parity.json", s);
  const auto r = run("verify --in " + path("parity.json"));
  EXPECT_EQ(r.exit_code, 2) << r.output;
  EXPECT_NE(r.output.find("parity residual 0.2"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("FAIL"), std::string::npos);
}

TEST_F(CliTest, ScrambleKeepsScoreAndWritesSidecar) {
  ASSERT_EQ(run("generate --n 3 --out " + path("g3.json")).exit_code, 0);
  const auto r = run("scramble --in " + path("g3.json") + " --out " + path("s3.json") + " --J 2 --seed 7");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  const json s = json::parse(slurp(path("s3.json")));
  EXPECT_EQ(s["d"], 4);
  EXPECT_EQ(s["seed"], 7);
  const json side = json::parse(slurp(path("s3.unitary.json")));
  EXPECT_EQ(side["J"], 2);
  EXPECT_EQ(side["seed"], 7);
  EXPECT_EQ(side["unitary"]["dim"], 4);

  ASSERT_EQ(run("verify --in " + path("s3.json") + " --out " + path("v.json")).exit_code, 0);
  const double p = json::parse(slurp(path("v.json")))["success_probability"].get<double>();
  EXPECT_NEAR(p, 0.5 * (1 + 1 / std::sqrt(3.0)), 1e-12);
}

TEST_F(CliTest, ScrambleWithOneCopyPreservesScore) {
  ASSERT_EQ(run("generate --n 2 --out " + path("g2.json")).exit_code, 0);
  ASSERT_EQ(run("scramble --in " + path("g2.json") + " --out " + path("s.json") + " --J 1 --seed 0").exit_code, 0);
  ASSERT_EQ(run("verify --in " + path("s.json") + " --out " + path("v.json")).exit_code, 0);
  const double p = json::parse(slurp(path("v.json")))["success_probability"].get<double>();
  EXPECT_NEAR(p, quantum_bound(2), 1e-12);
}

TEST_F(CliTest, ScrambleFiveWithThreeCopiesAndDeterminism) {
  ASSERT_EQ(run("generate --n 5 --out " + path("g5.json")).exit_code, 0);
  ASSERT_EQ(run("scramble --in " + path("g5.json") + " --out " + path("a.json") + " --J 3 --seed 12").exit_code, 0);
  ASSERT_EQ(run("scramble --in " + path("g5.json") + " --out " + path("b.json") + " --J 3 --seed 12").exit_code, 0);
  EXPECT_EQ(json::parse(slurp(path("a.json")))["d"], 12);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_EQ(slurp(path("a.unitary.json")), slurp(path("b.unitary.json")));
}

TEST_F(CliTest, ExtractScrambledThreePasses) {
  ASSERT_EQ(run("generate --n 3 --out " + path("g3.json")).exit_code, 0);
  ASSERT_EQ(run("scramble --in " + path("g3.json") + " --out " + path("s3.json") + " --J 2 --seed 4").exit_code, 0);
  const auto r = run("extract --in " + path("s3.json") + " --out " + path("c.json"));
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("sectors=(2, 0)"), std::string::npos) << r.output;
  const json c = json::parse(slurp(path("c.json")));
  EXPECT_TRUE(c["extraction"]["ok"].get<bool>());
  EXPECT_EQ(c["extraction"]["sectors"], json::array({2, 0}));
  EXPECT_EQ(c["seed"], 4);
}

TEST_F(CliTest, ExtractClassicalDiagonalFails) {
  // The exact noncontextual optimum written as diagonal matrices: parity
  // oblivious, but no better than the classical bound.
  const auto sol = classical::solve_exact(classical::build_lp(2));
  std::vector<ComplexMatrix> states;
  for (std::uint32_t delta = 0; delta < 4; ++delta) {
    ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
    for (std::uint32_t l = 0; l < 4; ++l) rho(l, l) = sol.model.weight(l, delta).get_d();
    states.push_back(rho);
  }
  const Strategy s(PreparationEnsemble::from_states(2, states),
                   MeasurementSet::from_matrices({pom::testing::diag({1.0, 1.0, -1.0, -1.0}),
                                                  pom::testing::diag({1.0, -1.0, 1.0, -1.0})}));
  write_strategy("classical.json", s);
  const auto r = run("extract --in " + path("classical.json"));
  EXPECT_EQ(r.exit_code, 2) << r.output;
  EXPECT_NE(r.output.find("FAIL"), std::string::npos);
}

TEST_F(CliTest, ExtractTruncatedJsonIsParseError) {
  ASSERT_EQ(run("generate --n 2 --out " + path("g2.json")).exit_code, 0);
  const std::string text = slurp(path("g2.json"));
  io::write_text_file(path("trunc.json"), text.substr(0, text.size() / 2));
  const auto r = run("extract --in " + path("trunc.json"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.output.find("ParseError"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("trunc.json:"), std::string::npos) << r.output;
}

TEST_F(CliTest, MissingInputIsIoError) {
  const auto r = run("verify --in " + path("nope.json"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.output.find("IoError"), std::string::npos) << r.output;
}

TEST_F(CliTest, GeometryThreeBits) {
  const auto r = run("geometry --n 3 --out-dir " + path("geo"));
  EXPECT_EQ(r.exit_code, 0) << r.output;
  const auto vertices = read_csv(path("geo/vertices.csv"));
  ASSERT_EQ(vertices.size(), 9u);
  EXPECT_EQ(vertices[0], (std::vector<std::string>{"delta", "bits", "coord_1", "coord_2", "coord_3", "norm"}));
  for (std::size_t k = 1; k < vertices.size(); ++k) EXPECT_NEAR(std::stod(vertices[k][5]), 1.0, 1e-12);
  const auto pairs = read_csv(path("geo/distances.csv"));
  ASSERT_EQ(pairs.size(), 29u);
  for (std::size_t k = 1; k < pairs.size(); ++k) {
    const double dist = std::stod(pairs[k][3]);
    const double expected = std::stod(pairs[k][4]);
    EXPECT_NEAR(dist, expected, 1e-12);
    EXPECT_NEAR(expected, 4.0 * std::stoi(pairs[k][2]) / 3.0, 1e-15);
  }
}

TEST_F(CliTest, GeometryTwoBitsIsASquare) {
  ASSERT_EQ(run("geometry --n 2 --out-dir " + path("geo")).exit_code, 0);
  const auto pairs = read_csv(path("geo/distances.csv"));
  ASSERT_EQ(pairs.size(), 7u);
  int edges = 0;
  for (std::size_t k = 1; k < pairs.size(); ++k) {
    if (pairs[k][2] == "1") {
      ++edges;
      EXPECT_NEAR(std::stod(pairs[k][3]), 2.0, 1e-12);
    } else {
      EXPECT_NEAR(std::stod(pairs[k][3]), 4.0, 1e-12);
    }
  }
  EXPECT_EQ(edges, 4);
  EXPECT_EQ(run("geometry --n 11 --out-dir " + path("geo11")).exit_code, 1);
}

TEST_F(CliTest, ToleranceOverridesAndPresets) {
  ASSERT_EQ(run("generate --n 3 --out " + path("g3.json")).exit_code, 0);
  ASSERT_EQ(run("scramble --in " + path("g3.json") + " --out " + path("s3.json") + " --J 2 --seed 1").exit_code, 0);
  // Rounding noise after scrambling cannot meet an absurdly small tolerance.
  EXPECT_EQ(run("extract --in " + path("s3.json") + " --tol-certification 1e-30").exit_code, 2);
  io::write_text_file(path("tight.json"), R"({"certification": 1e-30})");
  EXPECT_EQ(run("extract --in " + path("s3.json"), "POM_TOL_PROFILE=" + path("tight.json")).exit_code, 2);
  // Flags win over the preset.
  EXPECT_EQ(run("extract --in " + path("s3.json") + " --tol-certification 1e-7", "POM_TOL_PROFILE=" + path("tight.json"))
                .exit_code,
            0);
  io::write_text_file(path("neg.json"), R"({"structural": -1})");
  EXPECT_EQ(run("extract --in " + path("s3.json"), "POM_TOL_PROFILE=" + path("neg.json")).exit_code, 1);
  EXPECT_EQ(run("verify --in " + path("s3.json") + " --tol-structural 0").exit_code, 1);
}

TEST_F(CliTest, PipelinePassesAcrossSizes) {
  for (int n = 2; n <= 6; ++n) {
    const std::string g = path("g" + std::to_string(n) + ".json");
    ASSERT_EQ(run("generate --n " + std::to_string(n) + " --out " + g).exit_code, 0);
    ASSERT_EQ(run("verify --in " + g).exit_code, 0);
    for (int J = 1; J <= 3; ++J) {
      const std::string s = path("s" + std::to_string(n) + std::to_string(J) + ".json");
      ASSERT_EQ(run("scramble --in " + g + " --out " + s + " --J " + std::to_string(J) + " --seed " +
                    std::to_string(n * 10 + J))
                    .exit_code,
                0);
      EXPECT_EQ(run("verify --in " + s).exit_code, 0) << "n=" << n << " J=" << J;
      const auto r = run("extract --in " + s);
      EXPECT_EQ(r.exit_code, 0) << "n=" << n << " J=" << J << "\n" << r.output;
    }
  }
}
