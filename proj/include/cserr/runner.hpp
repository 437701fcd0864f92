#pragma once

#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cserr/bath.hpp"
#include "cserr/bounds.hpp"
#include "cserr/common.hpp"
#include "cserr/engine.hpp"
#include "cserr/models.hpp"

namespace cserr {

// Configuration, execution and reproducible output. Configs are JSON; CLI
// flags override individual fields. Omega = 1 sets the energy unit.

enum class HamiltonianKind { Full, PureDephasing };

struct BathConfig {
  int N = 10;
  double a_over_omega = std::numeric_limits<double>::quiet_NaN();  // required
  // sum_k' b_kk'/A_k of the separable dipolar profile. The default keeps
  // H_dip a weak correction; at 2500 it dominates every other energy and
  // equilibrates the conditional bath polarization within sectors.
  double dipolar_ratio = 1.0 / 2500.0;
  double omega_ratio = 1e-3;
};

struct EnvConfig {
  enum class Kind { SectorUniform, PureBits, EnsembleFile };
  Kind kind = Kind::SectorUniform;
  int m = 0;
  std::string bits;
  std::string file;
};

struct ScalingConfig {
  std::string pattern = "01100";
  std::vector<int> n_values = {4, 6, 8, 10};
};

struct Limits {
  int max_photons = 12;
  int max_joint_qubits = 12;
  int max_total_qubits = 14;  // brute-force oracle
};

struct RunConfig {
  int n_photons = 5;
  BathConfig bath;
  HamiltonianKind hamiltonian = HamiltonianKind::PureDephasing;
  EnvConfig env;
  // "bounds", "markov_fit", "trajectory_fit", "polarization", "scaling",
  // "oracle_check"
  std::set<std::string> outputs = {"bounds", "markov_fit"};
  MarkovFitMode markov_mode = MarkovFitMode::LeastSquaresLog;
  ScalingConfig scaling;
  unsigned seed = 0;  // reserved for optional random environment states
  Limits limits;

  void validate() const;
  std::string to_json_string(int indent = -1) const;
  static RunConfig from_json_string(const std::string& text);
  static RunConfig from_json_file(const std::filesystem::path& path);
  std::string fingerprint() const;

  EnvState make_env(int N) const;
  BathSpec make_bath(int N) const;
};

struct OracleCheck {
  double max_deviation = 0.0;
  double max_dot_deviation = 0.0;
  bool pass = false;
};

struct ScalingResult {
  Pattern pattern = 0;
  std::vector<int> n_values;
  RVec exact;      // P(pattern) per N
  RVec bound;      // eq6 per N
  FitReport exact_fit;
  FitReport bound_fit;
};

struct RunResult {
  RunConfig config;
  std::string fingerprint;
  double omega_eff = 0.0;
  double delta = 0.0;
  double b_n_mean = 0.0;
  double b_n_fluct = 0.0;
  ErrorDistribution dist;
  std::optional<BoundReport> bounds;
  std::optional<FitReport> markov_fit;
  std::optional<FitReport> trajectory_fit;
  std::optional<ScalingResult> scaling;
  std::optional<OracleCheck> oracle;
  std::map<std::string, double> timings_ms;
};

// Executes one configuration: distribution, then every requested artifact.
RunResult run(const RunConfig& config);

// Engine vs. brute-force oracle on a config small enough for the oracle.
OracleCheck oracle_check(const RunConfig& config, double tol = 1e-10);

// Per-pattern CSV ordered by (h, pattern integer); %.12e formatting.
void write_distribution_csv(const RunResult& result,
                            const std::filesystem::path& path);
// Figure-ready projection: running x index per band-ordered pattern.
void write_plot_csv(const RunResult& result,
                    const std::filesystem::path& path);
void write_scaling_csv(const RunResult& result,
                       const std::filesystem::path& path);
// Versioned JSON summary (fit parameters, p_pm, Omega_eff, delta,
// normalisation residual, timings).
void write_summary_json(const RunResult& result,
                        const std::filesystem::path& path);

// Writes every requested artifact under out_dir and returns the file list.
std::vector<std::filesystem::path> write_outputs(
    const RunResult& result, const std::filesystem::path& out_dir,
    bool plot_data = false);

// Named figure-reproduction recipes: fig2-upper, fig2-lower, fig2-scaling,
// fig3.
RunConfig reproduce_config(const std::string& name);

}  // namespace cserr
