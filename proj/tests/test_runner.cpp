#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cserr/runner.hpp"

using namespace cserr;
namespace fs = std::filesystem;

namespace {

RunConfig small_config() {
  RunConfig c;
  c.n_photons = 3;
  c.bath.N = 2;
  c.bath.a_over_omega = 1.0;
  c.env.kind = EnvConfig::Kind::SectorUniform;
  c.env.m = 0;
  return c;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

TEST_CASE("config JSON round trip") {
  RunConfig c = small_config();
  c.outputs = {"bounds", "markov_fit", "scaling"};
  c.scaling.pattern = "011";
  c.scaling.n_values = {2, 4, 6};
  const RunConfig back = RunConfig::from_json_string(c.to_json_string());
  CHECK(back.n_photons == c.n_photons);
  CHECK(back.bath.N == c.bath.N);
  CHECK(back.bath.a_over_omega == c.bath.a_over_omega);
  CHECK(back.bath.dipolar_ratio == c.bath.dipolar_ratio);
  CHECK(back.hamiltonian == c.hamiltonian);
  CHECK(back.env.m == c.env.m);
  CHECK(back.outputs == c.outputs);
  CHECK(back.scaling.pattern == c.scaling.pattern);
  CHECK(back.scaling.n_values == c.scaling.n_values);
  CHECK(back.fingerprint() == c.fingerprint());
}

TEST_CASE("defaults describe the five-photon N = 10 dephasing layout") {
  RunConfig c;
  CHECK(c.n_photons == 5);
  CHECK(c.bath.N == 10);
  CHECK(c.bath.dipolar_ratio == 1.0 / 2500.0);
  CHECK(c.bath.omega_ratio == 1e-3);
  CHECK(c.hamiltonian == HamiltonianKind::PureDephasing);
  CHECK(c.env.kind == EnvConfig::Kind::SectorUniform);
  CHECK(c.env.m == 0);
  // the coupling strength has no default
  CHECK_THROWS_AS(c.validate(), config_error);
}

TEST_CASE("config validation errors") {
  RunConfig c = small_config();
  c.env.m = 1;  // parity mismatch with N = 2
  CHECK_THROWS_AS(c.validate(), config_error);

  c = small_config();
  c.outputs = {"nonsense"};
  CHECK_THROWS_AS(c.validate(), config_error);

  c = small_config();
  c.n_photons = 40;
  CHECK_THROWS_AS(c.validate(), resource_error);

  CHECK_THROWS_AS(RunConfig::from_json_string("{not json"), config_error);
  CHECK_THROWS_AS(RunConfig::from_json_string(R"({"env_state":{}})"),
                  config_error);
}

TEST_CASE("run produces an ordered CSV with dominated probabilities") {
  const RunConfig c = small_config();
  const RunResult result = run(c);
  CHECK(result.dist.normalization_residual() < 1e-10);
  REQUIRE(result.bounds.has_value());
  REQUIRE(result.markov_fit.has_value());

  const fs::path dir = fs::path("test_out") / "small";
  const auto files = write_outputs(result, dir, /*plot_data=*/true);
  CHECK(files.size() == 3);

  const auto rows = read_csv(dir / "distribution.csv");
  REQUIRE(rows.size() == 9);  // header + 8 patterns
  CHECK(rows[0][0] == "pattern_int");
  int prev_h = -1;
  Pattern prev_alpha = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const int h = std::stoi(rows[r][2]);
    const Pattern alpha = std::stoul(rows[r][0]);
    if (h == prev_h) CHECK(alpha > prev_alpha);
    CHECK(h >= prev_h);
    prev_h = h;
    prev_alpha = alpha;
    const double p_exact = std::stod(rows[r][3]);
    const double eq6 = std::stod(rows[r][6]);
    CHECK(p_exact <= eq6 + 1e-12);
    CHECK(rows[r][1] == pattern_to_string(alpha, 3));
  }

  const std::string summary = read_file(dir / "summary.json");
  CHECK(summary.find("\"schema_version\"") != std::string::npos);
  CHECK(summary.find("\"p_minus\"") != std::string::npos);
  CHECK(summary.find("\"normalization_residual\"") != std::string::npos);
  CHECK(summary.find(result.fingerprint) != std::string::npos);
}

TEST_CASE("repeated runs write byte-identical CSVs") {
  const RunConfig c = small_config();
  const fs::path dir_a = fs::path("test_out") / "rep_a";
  const fs::path dir_b = fs::path("test_out") / "rep_b";
  write_outputs(run(c), dir_a);
  write_outputs(run(c), dir_b);
  CHECK(read_file(dir_a / "distribution.csv") ==
        read_file(dir_b / "distribution.csv"));
}

TEST_CASE("oracle check passes for both Hamiltonians") {
  RunConfig c = small_config();
  for (HamiltonianKind kind :
       {HamiltonianKind::PureDephasing, HamiltonianKind::Full}) {
    c.hamiltonian = kind;
    const OracleCheck check = oracle_check(c);
    CHECK(check.pass);
    CHECK(check.max_deviation < 1e-10);
    CHECK(check.max_dot_deviation < 1e-10);
  }

  c.bath.N = 10;  // 3 + 1 + 10 = 14 qubits would pass; 12 photons would not
  c.n_photons = 12;
  CHECK_THROWS_AS(oracle_check(c), resource_error);
}

TEST_CASE("scaling sweep over environment sizes") {
  RunConfig c = small_config();
  c.outputs = {"bounds", "scaling"};
  c.scaling.pattern = "010";
  c.scaling.n_values = {2, 4, 6, 8};
  const RunResult result = run(c);
  REQUIRE(result.scaling.has_value());
  CHECK(result.scaling->exact.size() == 4);
  CHECK(result.scaling->exact_fit.params.count("a") == 1);
  CHECK(result.scaling->bound_fit.params.count("c") == 1);

  const fs::path dir = fs::path("test_out") / "scaling";
  write_outputs(result, dir);
  const auto rows = read_csv(dir / "scaling.csv");
  REQUIRE(rows.size() == 5);
  CHECK(rows[0][0] == "N");
}

TEST_CASE("ensemble files load as weighted members") {
  const fs::path dir = fs::path("test_out");
  fs::create_directories(dir);
  const fs::path file = dir / "ensemble.json";
  {
    std::ofstream out(file);
    out << R"({"members": [{"weight": 0.5, "bits": "01"},
                           {"weight": 0.5, "bits": "10"}]})";
  }
  RunConfig c = small_config();
  c.env.kind = EnvConfig::Kind::EnsembleFile;
  c.env.file = file.string();
  const RunResult result = run(c);
  CHECK(result.dist.normalization_residual() < 1e-10);
  // both members sit in the m = 0 sector
  CHECK(result.b_n_mean == doctest::Approx(0.0));
}

TEST_CASE("reproduction recipes pin the figure parameters") {
  const RunConfig upper = reproduce_config("fig2-upper");
  CHECK(upper.n_photons == 5);
  CHECK(upper.bath.N == 10);
  CHECK(upper.bath.a_over_omega == 0.5);
  CHECK(upper.hamiltonian == HamiltonianKind::PureDephasing);

  const RunConfig lower = reproduce_config("fig2-lower");
  CHECK(lower.bath.a_over_omega == 2.0);
  CHECK(lower.env.kind == EnvConfig::Kind::SectorUniform);
  CHECK(lower.env.m == 0);

  const RunConfig scaling = reproduce_config("fig2-scaling");
  CHECK(scaling.outputs.count("scaling") == 1);
  CHECK(scaling.scaling.pattern == "01100");
  CHECK(scaling.scaling.n_values == std::vector<int>{4, 6, 8, 10});

  const RunConfig fig3 = reproduce_config("fig3");
  CHECK(fig3.n_photons == 8);
  CHECK(fig3.bath.N == 6);
  CHECK(fig3.bath.a_over_omega == 4.0);
  CHECK(fig3.hamiltonian == HamiltonianKind::Full);
  CHECK(fig3.outputs.count("trajectory_fit") == 1);

  CHECK_THROWS_AS(reproduce_config("fig9"), config_error);
}
