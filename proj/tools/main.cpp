#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cserr/runner.hpp"

namespace {

using namespace cserr;

struct CliOverrides {
  std::string config_file;
  std::string out_dir = "out";
  std::string emit;
  int n_photons = -1;
  int env_n = -1;
  double a_over_omega = std::numeric_limits<double>::quiet_NaN();
  double dipolar_ratio = std::numeric_limits<double>::quiet_NaN();
  double omega_ratio = std::numeric_limits<double>::quiet_NaN();
  std::string hamiltonian;
  int sector_m = std::numeric_limits<int>::min();
  std::string pure_bits;
  std::string ensemble_file;
  std::string markov_mode;
  std::string scaling_pattern;
  std::vector<int> scaling_n;
  long seed = -1;
};

void add_common_flags(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--config", o.config_file, "JSON run configuration file");
  cmd->add_option("--out", o.out_dir, "output directory")
      ->capture_default_str();
  cmd->add_option("--emit", o.emit,
                  "extra emission format; 'plot-data' writes plot.csv");
  cmd->add_option("-n,--photons", o.n_photons, "number of photons");
  cmd->add_option("-N,--env-sites", o.env_n, "environment site count");
  cmd->add_option("-A,--a-over-omega", o.a_over_omega,
                  "total hyperfine coupling over Omega");
  cmd->add_option("--dipolar-ratio", o.dipolar_ratio,
                  "sum_k' b_kk'/A_k of the dipolar profile");
  cmd->add_option("--omega-ratio", o.omega_ratio,
                  "sum_k omega'_k / Omega_eff");
  cmd->add_option("--hamiltonian", o.hamiltonian, "full | pure_dephasing");
  cmd->add_option("--sector", o.sector_m, "SectorUniform initial state m");
  cmd->add_option("--pure-bits", o.pure_bits,
                  "pure initial state bitstring (site N first)");
  cmd->add_option("--ensemble-file", o.ensemble_file,
                  "JSON ensemble description");
  cmd->add_option("--seed", o.seed, "seed for optional random states");
}

RunConfig build_config(const CliOverrides& o, RunConfig base) {
  if (!o.config_file.empty())
    base = RunConfig::from_json_file(o.config_file);
  if (o.n_photons > 0) base.n_photons = o.n_photons;
  if (o.env_n > 0) base.bath.N = o.env_n;
  if (!std::isnan(o.a_over_omega)) base.bath.a_over_omega = o.a_over_omega;
  if (!std::isnan(o.dipolar_ratio)) base.bath.dipolar_ratio = o.dipolar_ratio;
  if (!std::isnan(o.omega_ratio)) base.bath.omega_ratio = o.omega_ratio;
  if (!o.hamiltonian.empty())
    base.hamiltonian = o.hamiltonian == "full"
                           ? HamiltonianKind::Full
                           : (o.hamiltonian == "pure_dephasing"
                                  ? HamiltonianKind::PureDephasing
                                  : throw config_error(
                                        "unknown hamiltonian '" +
                                        o.hamiltonian + "'"));
  if (o.sector_m != std::numeric_limits<int>::min()) {
    base.env.kind = EnvConfig::Kind::SectorUniform;
    base.env.m = o.sector_m;
  }
  if (!o.pure_bits.empty()) {
    base.env.kind = EnvConfig::Kind::PureBits;
    base.env.bits = o.pure_bits;
  }
  if (!o.ensemble_file.empty()) {
    base.env.kind = EnvConfig::Kind::EnsembleFile;
    base.env.file = o.ensemble_file;
  }
  if (!o.markov_mode.empty()) {
    if (o.markov_mode == "log")
      base.markov_mode = MarkovFitMode::LeastSquaresLog;
    else if (o.markov_mode == "bounding")
      base.markov_mode = MarkovFitMode::Bounding;
    else
      throw config_error("--mode must be log or bounding");
  }
  if (!o.scaling_pattern.empty()) base.scaling.pattern = o.scaling_pattern;
  if (!o.scaling_n.empty()) base.scaling.n_values = o.scaling_n;
  if (o.seed >= 0) base.seed = static_cast<unsigned>(o.seed);
  return base;
}

int execute(const RunConfig& config, const CliOverrides& o) {
  const RunResult result = run(config);
  const auto files = write_outputs(result, o.out_dir, o.emit == "plot-data");
  std::printf("omega_eff=%.12g delta=%.12g normalization_residual=%.3e\n",
              result.omega_eff, result.delta,
              result.dist.normalization_residual());
  if (result.bounds)
    std::printf("p_plus=%.12g p_minus=%.12g\n", result.bounds->p_plus,
                result.bounds->p_minus);
  if (result.markov_fit)
    std::printf("markov_fit p=%.12g\n", result.markov_fit->params.at("p"));
  if (result.trajectory_fit)
    std::printf("trajectory_fit p_x=%.6g p_y=%.6g p_z=%.6g\n",
                result.trajectory_fit->params.at("p_x"),
                result.trajectory_fit->params.at("p_y"),
                result.trajectory_fit->params.at("p_z"));
  if (result.scaling)
    std::printf("scaling exact a=%.6g s=%.6g rel_rms=%.3g | bound a=%.6g "
                "c=%.6g rel_rms=%.3g\n",
                result.scaling->exact_fit.params.at("a"),
                result.scaling->exact_fit.params.at("s"),
                result.scaling->exact_fit.params.at("rel_rms"),
                result.scaling->bound_fit.params.at("a"),
                result.scaling->bound_fit.params.at("c"),
                result.scaling->bound_fit.params.at("rel_rms"));
  for (const auto& f : files) std::printf("wrote %s\n", f.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"error distributions on emitter-generated photonic cluster "
               "states with a spin environment"};
  app.require_subcommand(1);

  CliOverrides o;
  std::string recipe;
  std::string mode;

  auto* dist_cmd = app.add_subcommand("distribution",
                                      "exact error-pattern probabilities");
  auto* bounds_cmd = app.add_subcommand("bounds",
                                        "probabilities plus norm bounds");
  auto* markov_cmd = app.add_subcommand("fit-markov",
                                        "fit the p^h (1-p)^(n-h) model");
  markov_cmd->add_option("--mode", o.markov_mode, "log | bounding");
  auto* traj_cmd = app.add_subcommand("fit-trajectory",
                                      "fit the X/Y/Z trajectory model");
  auto* scaling_cmd = app.add_subcommand("scaling",
                                         "environment-size scaling sweep");
  scaling_cmd->add_option("--pattern", o.scaling_pattern,
                          "error pattern bitstring");
  scaling_cmd->add_option("--n-values", o.scaling_n,
                          "environment sizes to sweep");
  auto* polar_cmd = app.add_subcommand("polarization",
                                       "conditional environment polarization");
  auto* oracle_cmd = app.add_subcommand("oracle-check",
                                        "engine vs. brute-force oracle");
  auto* repro_cmd = app.add_subcommand("reproduce",
                                       "figure-reproduction recipes");
  repro_cmd->add_option("name", recipe,
                        "fig2-upper | fig2-lower | fig2-scaling | fig3")
      ->required();

  for (auto* cmd : {dist_cmd, bounds_cmd, markov_cmd, traj_cmd, scaling_cmd,
                    polar_cmd, oracle_cmd, repro_cmd})
    add_common_flags(cmd, o);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig base;
    if (repro_cmd->parsed()) base = reproduce_config(recipe);
    RunConfig config = build_config(o, base);
    if (dist_cmd->parsed()) config.outputs = {};
    if (bounds_cmd->parsed()) config.outputs = {"bounds"};
    if (markov_cmd->parsed()) config.outputs = {"bounds", "markov_fit"};
    if (traj_cmd->parsed()) config.outputs = {"trajectory_fit"};
    if (scaling_cmd->parsed()) config.outputs = {"bounds", "scaling"};
    if (polar_cmd->parsed()) config.outputs = {"polarization"};
    if (oracle_cmd->parsed()) {
      config.outputs = {};
      config.validate();
      const OracleCheck check = oracle_check(config);
      std::printf("oracle max deviation: P %.3e, P_dot %.3e -> %s\n",
                  check.max_deviation, check.max_dot_deviation,
                  check.pass ? "pass" : "FAIL");
      if (!check.pass) return 3;
      return 0;
    }
    return execute(config, o);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const invariant_error& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return 3;
  } catch (const resource_error& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
