#include "cserr/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cserr {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

class Stopwatch {
 public:
  explicit Stopwatch(std::map<std::string, double>& sink, std::string key)
      : sink_(sink), key_(std::move(key)),
        start_(std::chrono::steady_clock::now()) {}
  ~Stopwatch() {
    const auto stop = std::chrono::steady_clock::now();
    sink_[key_] =
        std::chrono::duration<double, std::milli>(stop - start_).count();
  }

 private:
  std::map<std::string, double>& sink_;
  std::string key_;
  std::chrono::steady_clock::time_point start_;
};

HamiltonianKind parse_hamiltonian(const std::string& s) {
  if (s == "full") return HamiltonianKind::Full;
  if (s == "pure_dephasing") return HamiltonianKind::PureDephasing;
  throw config_error("hamiltonian must be 'full' or 'pure_dephasing', got '" +
                     s + "'");
}

std::string hamiltonian_name(HamiltonianKind kind) {
  return kind == HamiltonianKind::Full ? "full" : "pure_dephasing";
}

}  // namespace

void RunConfig::validate() const {
  if (n_photons < 1) throw config_error("n_photons must be >= 1");
  if (n_photons > limits.max_photons)
    throw resource_error("n_photons = " + std::to_string(n_photons) +
                         " exceeds limit " +
                         std::to_string(limits.max_photons));
  if (bath.N < 1) throw config_error("bath.N must be >= 1");
  if (!(bath.a_over_omega >= 0.0))
    throw config_error("bath.A_over_Omega is required and must be >= 0");
  if (hamiltonian == HamiltonianKind::Full &&
      bath.N + 1 > limits.max_joint_qubits)
    throw resource_error("full Hamiltonian with N = " +
                         std::to_string(bath.N) + " exceeds joint-qubit limit");
  if (env.kind == EnvConfig::Kind::SectorUniform) {
    if (std::abs(env.m) > bath.N || ((bath.N + env.m) % 2) != 0)
      throw config_error("env_state.sector_uniform m = " +
                         std::to_string(env.m) + " invalid for N = " +
                         std::to_string(bath.N));
  }
  if (outputs.count("scaling")) {
    if (scaling.n_values.size() < 3)
      throw config_error("scaling.N_values needs at least 3 sizes");
    for (int nv : scaling.n_values)
      if (nv < 1) throw config_error("scaling.N_values must be positive");
  }
  for (const auto& o : outputs)
    if (o != "bounds" && o != "markov_fit" && o != "trajectory_fit" &&
        o != "polarization" && o != "scaling" && o != "oracle_check")
      throw config_error("unknown output '" + o + "'");
}

std::string RunConfig::to_json_string(int indent) const {
  json j;
  j["schema_version"] = 1;
  j["n_photons"] = n_photons;
  j["bath"] = {{"N", bath.N},
               {"A_over_Omega", bath.a_over_omega},
               {"dipolar_ratio", bath.dipolar_ratio},
               {"omega_ratio", bath.omega_ratio}};
  j["hamiltonian"] = hamiltonian_name(hamiltonian);
  switch (env.kind) {
    case EnvConfig::Kind::SectorUniform:
      j["env_state"] = {{"sector_uniform", env.m}};
      break;
    case EnvConfig::Kind::PureBits:
      j["env_state"] = {{"pure_bits", env.bits}};
      break;
    case EnvConfig::Kind::EnsembleFile:
      j["env_state"] = {{"ensemble_file", env.file}};
      break;
  }
  j["outputs"] = outputs;
  j["markov_fit_mode"] = markov_mode == MarkovFitMode::LeastSquaresLog
                             ? "least_squares_log"
                             : "bounding";
  j["scaling"] = {{"pattern", scaling.pattern},
                  {"N_values", scaling.n_values}};
  j["seed"] = seed;
  j["limits"] = {{"max_photons", limits.max_photons},
                 {"max_joint_qubits", limits.max_joint_qubits},
                 {"max_total_qubits", limits.max_total_qubits}};
  return indent >= 0 ? j.dump(indent) : j.dump();
}

RunConfig RunConfig::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config parse error: ") + e.what());
  }
  RunConfig c;
  try {
    if (j.contains("n_photons")) c.n_photons = j.at("n_photons").get<int>();
    if (j.contains("bath")) {
      const auto& b = j.at("bath");
      if (b.contains("N")) c.bath.N = b.at("N").get<int>();
      if (b.contains("A_over_Omega"))
        c.bath.a_over_omega = b.at("A_over_Omega").get<double>();
      if (b.contains("dipolar_ratio"))
        c.bath.dipolar_ratio = b.at("dipolar_ratio").get<double>();
      if (b.contains("omega_ratio"))
        c.bath.omega_ratio = b.at("omega_ratio").get<double>();
    }
    if (j.contains("hamiltonian"))
      c.hamiltonian = parse_hamiltonian(j.at("hamiltonian").get<std::string>());
    if (j.contains("env_state")) {
      const auto& e = j.at("env_state");
      if (e.contains("sector_uniform")) {
        c.env.kind = EnvConfig::Kind::SectorUniform;
        c.env.m = e.at("sector_uniform").get<int>();
      } else if (e.contains("pure_bits")) {
        c.env.kind = EnvConfig::Kind::PureBits;
        c.env.bits = e.at("pure_bits").get<std::string>();
      } else if (e.contains("ensemble_file")) {
        c.env.kind = EnvConfig::Kind::EnsembleFile;
        c.env.file = e.at("ensemble_file").get<std::string>();
      } else {
        throw config_error(
            "env_state needs sector_uniform, pure_bits or ensemble_file");
      }
    }
    if (j.contains("outputs")) {
      c.outputs.clear();
      for (const auto& o : j.at("outputs"))
        c.outputs.insert(o.get<std::string>());
    }
    if (j.contains("markov_fit_mode")) {
      const auto mode = j.at("markov_fit_mode").get<std::string>();
      if (mode == "least_squares_log")
        c.markov_mode = MarkovFitMode::LeastSquaresLog;
      else if (mode == "bounding")
        c.markov_mode = MarkovFitMode::Bounding;
      else
        throw config_error("markov_fit_mode must be least_squares_log or "
                           "bounding");
    }
    if (j.contains("scaling")) {
      const auto& s = j.at("scaling");
      if (s.contains("pattern"))
        c.scaling.pattern = s.at("pattern").get<std::string>();
      if (s.contains("N_values"))
        c.scaling.n_values = s.at("N_values").get<std::vector<int>>();
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<unsigned>();
    if (j.contains("limits")) {
      const auto& l = j.at("limits");
      if (l.contains("max_photons"))
        c.limits.max_photons = l.at("max_photons").get<int>();
      if (l.contains("max_joint_qubits"))
        c.limits.max_joint_qubits = l.at("max_joint_qubits").get<int>();
      if (l.contains("max_total_qubits"))
        c.limits.max_total_qubits = l.at("max_total_qubits").get<int>();
    }
  } catch (const json::exception& e) {
    throw config_error(std::string("config field error: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_string(ss.str());
}

std::string RunConfig::fingerprint() const {
  return fnv1a_hex(to_json_string());
}

EnvState RunConfig::make_env(int N) const {
  switch (env.kind) {
    case EnvConfig::Kind::SectorUniform:
      return EnvState::sector_uniform(N, env.m);
    case EnvConfig::Kind::PureBits:
      return EnvState::pure_bits(N, env.bits);
    case EnvConfig::Kind::EnsembleFile: {
      std::ifstream in(env.file);
      if (!in)
        throw config_error("cannot open ensemble file " + env.file);
      json j;
      try {
        in >> j;
      } catch (const json::parse_error& e) {
        throw config_error(std::string("ensemble file parse error: ") +
                           e.what());
      }
      std::vector<std::pair<double, Vec>> members;
      for (const auto& m : j.at("members")) {
        const double w = m.at("weight").get<double>();
        if (m.contains("bits")) {
          const auto bits = m.at("bits").get<std::string>();
          members.emplace_back(w,
                               EnvState::pure_bits(N, bits).members[0].second);
        } else {
          const auto& amp = m.at("amplitudes");
          Vec v(amp.size());
          for (std::size_t i = 0; i < amp.size(); ++i)
            v(i) = cx(amp[i][0].get<double>(), amp[i][1].get<double>());
          members.emplace_back(w, v);
        }
      }
      return EnvState::ensemble(N, std::move(members));
    }
  }
  throw config_error("unreachable env kind");
}

BathSpec RunConfig::make_bath(int N) const {
  return gaussian_profiles(N, bath.a_over_omega, bath.dipolar_ratio,
                           bath.omega_ratio, /*omega=*/1.0);
}

namespace {

struct Prepared {
  BathSpec spec;
  EnvState env;
  HamiltonianSet set;
  Mat u;
};

Prepared prepare(const RunConfig& config, int N) {
  Prepared p{config.make_bath(N), config.make_env(N), {}, {}};
  const bool need_full = config.hamiltonian == HamiltonianKind::Full ||
                         N + 1 <= 9;  // cheap enough to keep for checks
  p.set = build_dephasing_pair(p.spec, p.env, config.limits.max_joint_qubits,
                               need_full);
  p.u = config.hamiltonian == HamiltonianKind::Full
            ? step_unitary(p.set.h_full, p.set.omega_eff)
            : pd_step_unitary(p.set);
  return p;
}

}  // namespace

RunResult run(const RunConfig& config) {
  config.validate();
  RunResult result;
  result.config = config;
  result.fingerprint = config.fingerprint();

  Prepared p = [&] {
    Stopwatch sw(result.timings_ms, "hamiltonians");
    return prepare(config, config.bath.N);
  }();
  result.omega_eff = p.set.omega_eff;
  result.delta = p.set.delta;
  result.b_n_mean = p.set.b_n_mean;
  result.b_n_fluct = p.set.b_n_fluct;

  {
    Stopwatch sw(result.timings_ms, "distribution");
    EngineOptions opts;
    opts.max_photons = config.limits.max_photons;
    result.dist = distribution(p.u, p.env, config.n_photons, opts);
    result.dist.fingerprint = result.fingerprint;
  }

  if (config.outputs.count("bounds") || config.outputs.count("markov_fit")) {
    Stopwatch sw(result.timings_ms, "bounds");
    result.bounds = compute_bounds(config.n_photons, p.set, p.env);
  }
  if (config.outputs.count("markov_fit")) {
    Stopwatch sw(result.timings_ms, "markov_fit");
    result.markov_fit = fit_markov(result.dist, config.markov_mode);
  }
  if (config.outputs.count("trajectory_fit")) {
    Stopwatch sw(result.timings_ms, "trajectory_fit");
    result.trajectory_fit = fit_trajectory(result.dist);
  }
  if (config.outputs.count("scaling")) {
    Stopwatch sw(result.timings_ms, "scaling");
    ScalingResult sc;
    sc.pattern = string_to_pattern(config.scaling.pattern);
    sc.n_values = config.scaling.n_values;
    sc.exact = RVec(sc.n_values.size());
    sc.bound = RVec(sc.n_values.size());
    for (std::size_t i = 0; i < sc.n_values.size(); ++i) {
      Prepared ps = prepare(config, sc.n_values[i]);
      EngineOptions opts;
      opts.max_photons = config.limits.max_photons;
      const ErrorDistribution d =
          distribution(ps.u, ps.env, config.n_photons, opts);
      const BoundReport b = compute_bounds(config.n_photons, ps.set, ps.env);
      sc.exact(i) = d.probs(sc.pattern);
      sc.bound(i) = b.eq6(sc.pattern);
    }
    std::vector<std::pair<double, double>> exact_pts, bound_pts;
    for (std::size_t i = 0; i < sc.n_values.size(); ++i) {
      exact_pts.emplace_back(sc.n_values[i], sc.exact(i));
      bound_pts.emplace_back(sc.n_values[i], sc.bound(i));
    }
    sc.exact_fit = scaling_fit(exact_pts, ScalingForm::Exact);
    sc.bound_fit = scaling_fit(bound_pts, ScalingForm::Bound);
    result.scaling = std::move(sc);
  }
  if (config.outputs.count("oracle_check")) {
    Stopwatch sw(result.timings_ms, "oracle_check");
    result.oracle = oracle_check(config);
  }
  return result;
}

OracleCheck oracle_check(const RunConfig& config, double tol) {
  config.validate();
  if (config.n_photons + 1 + config.bath.N > config.limits.max_total_qubits)
    throw resource_error("oracle_check: config too large for the oracle");
  Prepared p = prepare(config, config.bath.N);
  EngineOptions opts;
  opts.max_photons = config.limits.max_photons;
  const ErrorDistribution engine =
      distribution(p.u, p.env, config.n_photons, opts);
  const ErrorDistribution oracle = brute_force_oracle(
      p.u, p.env, config.n_photons, config.limits.max_total_qubits);
  OracleCheck check;
  check.max_deviation = (engine.probs - oracle.probs).cwiseAbs().maxCoeff();
  check.max_dot_deviation =
      (engine.dot_probs - oracle.dot_probs).cwiseAbs().maxCoeff();
  check.pass = check.max_deviation <= tol && check.max_dot_deviation <= tol;
  return check;
}

namespace {

double opt_value(const RVec* v, Pattern alpha) {
  return v ? (*v)(alpha) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

void write_distribution_csv(const RunResult& result,
                            const std::filesystem::path& path) {
  const int n = result.dist.n;
  const RVec* eq5 = result.bounds ? &result.bounds->eq5 : nullptr;
  const RVec* eq6 = result.bounds ? &result.bounds->eq6 : nullptr;
  RVec markov, trajectory;
  if (result.markov_fit)
    markov = markov_model_probs(result.markov_fit->params.at("p"), n);
  if (result.trajectory_fit) {
    TrajectoryModel m{result.trajectory_fit->params.at("p_x"),
                      result.trajectory_fit->params.at("p_y"),
                      result.trajectory_fit->params.at("p_z"), n};
    trajectory = trajectory_distribution(m);
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write " + path.string());
  out << "pattern_int,bitstring,h,P_exact,P_dot,bound_eq5,bound_eq6,"
         "markov_fit,trajectory_fit,polarization\n";
  for (Pattern alpha : band_order(n)) {
    out << alpha << ',' << pattern_to_string(alpha, n) << ','
        << result.dist.h[alpha] << ',' << fmt(result.dist.probs(alpha)) << ','
        << fmt(result.dist.dot_probs(alpha)) << ',' << fmt(opt_value(eq5, alpha))
        << ',' << fmt(opt_value(eq6, alpha)) << ','
        << fmt(markov.size() ? markov(alpha)
                             : std::numeric_limits<double>::quiet_NaN())
        << ','
        << fmt(trajectory.size() ? trajectory(alpha)
                                 : std::numeric_limits<double>::quiet_NaN())
        << ',' << fmt(result.dist.polarization(alpha)) << '\n';
  }
}

void write_plot_csv(const RunResult& result,
                    const std::filesystem::path& path) {
  const int n = result.dist.n;
  const RVec* eq6 = result.bounds ? &result.bounds->eq6 : nullptr;
  RVec markov, trajectory;
  if (result.markov_fit)
    markov = markov_model_probs(result.markov_fit->params.at("p"), n);
  if (result.trajectory_fit) {
    TrajectoryModel m{result.trajectory_fit->params.at("p_x"),
                      result.trajectory_fit->params.at("p_y"),
                      result.trajectory_fit->params.at("p_z"), n};
    trajectory = trajectory_distribution(m);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write " + path.string());
  out << "x,h,P_exact,bound_eq6,markov_model,trajectory_model,polarization\n";
  int x = 0;
  for (Pattern alpha : band_order(n)) {
    out << x++ << ',' << result.dist.h[alpha] << ','
        << fmt(result.dist.probs(alpha)) << ',' << fmt(opt_value(eq6, alpha))
        << ','
        << fmt(markov.size() ? markov(alpha)
                             : std::numeric_limits<double>::quiet_NaN())
        << ','
        << fmt(trajectory.size() ? trajectory(alpha)
                                 : std::numeric_limits<double>::quiet_NaN())
        << ',' << fmt(result.dist.polarization(alpha)) << '\n';
  }
}

void write_scaling_csv(const RunResult& result,
                       const std::filesystem::path& path) {
  if (!result.scaling) throw config_error("no scaling result to write");
  const auto& sc = *result.scaling;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write " + path.string());
  out << "N,P_exact,bound_eq6,exact_fit,bound_fit\n";
  const double a_e = sc.exact_fit.params.at("a");
  const double s_e = sc.exact_fit.params.at("s");
  const double a_b = sc.bound_fit.params.at("a");
  const double c_b = sc.bound_fit.params.at("c");
  for (std::size_t i = 0; i < sc.n_values.size(); ++i) {
    const double nn = sc.n_values[i];
    out << sc.n_values[i] << ',' << fmt(sc.exact(i)) << ',' << fmt(sc.bound(i))
        << ',' << fmt(scaling_model(ScalingForm::Exact, a_e, s_e, nn)) << ','
        << fmt(scaling_model(ScalingForm::Bound, a_b, c_b, nn)) << '\n';
  }
}

namespace {

json fit_to_json(const FitReport& fit) {
  json j;
  for (const auto& [k, v] : fit.params) j["params"][k] = v;
  j["objective"] = fit.objective;
  j["bound_violations"] = fit.bound_violations.size();
  j["attainable"] = fit.attainable;
  if (!fit.note.empty()) j["note"] = fit.note;
  return j;
}

}  // namespace

void write_summary_json(const RunResult& result,
                        const std::filesystem::path& path) {
  json j;
  j["schema_version"] = 1;
  j["fingerprint"] = result.fingerprint;
  j["config"] = json::parse(result.config.to_json_string());
  j["omega_eff"] = result.omega_eff;
  j["delta"] = result.delta;
  j["b_n_mean"] = result.b_n_mean;
  j["b_n_fluct"] = result.b_n_fluct;
  j["normalization_residual"] = result.dist.normalization_residual();
  if (result.bounds) {
    j["p_plus"] = result.bounds->p_plus;
    j["p_minus"] = result.bounds->p_minus;
    j["p_plus_sector"] = result.bounds->p_plus_sector;
    j["p_minus_sector"] = result.bounds->p_minus_sector;
    j["multi_sector"] = result.bounds->multi_sector;
    j["cross_sector_coherence"] = result.bounds->cross_sector_coherence;
  }
  if (result.markov_fit) j["markov_fit"] = fit_to_json(*result.markov_fit);
  if (result.trajectory_fit)
    j["trajectory_fit"] = fit_to_json(*result.trajectory_fit);
  if (result.scaling) {
    json s;
    s["pattern"] = pattern_to_string(result.scaling->pattern,
                                     result.config.n_photons);
    s["N_values"] = result.scaling->n_values;
    s["exact"] = std::vector<double>(result.scaling->exact.begin(),
                                     result.scaling->exact.end());
    s["bound"] = std::vector<double>(result.scaling->bound.begin(),
                                     result.scaling->bound.end());
    s["exact_fit"] = fit_to_json(result.scaling->exact_fit);
    s["bound_fit"] = fit_to_json(result.scaling->bound_fit);
    j["scaling"] = s;
  }
  if (result.oracle) {
    j["oracle_check"] = {{"max_deviation", result.oracle->max_deviation},
                         {"max_dot_deviation",
                          result.oracle->max_dot_deviation},
                         {"pass", result.oracle->pass}};
  }
  j["timings_ms"] = result.timings_ms;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::vector<std::filesystem::path> write_outputs(
    const RunResult& result, const std::filesystem::path& out_dir,
    bool plot_data) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> files;
  files.push_back(out_dir / "distribution.csv");
  write_distribution_csv(result, files.back());
  if (result.scaling) {
    files.push_back(out_dir / "scaling.csv");
    write_scaling_csv(result, files.back());
  }
  if (plot_data) {
    files.push_back(out_dir / "plot.csv");
    write_plot_csv(result, files.back());
  }
  files.push_back(out_dir / "summary.json");
  write_summary_json(result, files.back());
  return files;
}

RunConfig reproduce_config(const std::string& name) {
  RunConfig c;  // defaults already match the fig2-lower layout
  if (name == "fig2-upper") {
    // the paper does not state the upper-panel coupling; 0.5 is assumed
    c.bath.a_over_omega = 0.5;
    c.outputs = {"bounds", "markov_fit", "polarization"};
  } else if (name == "fig2-lower") {
    c.bath.a_over_omega = 2.0;
    c.outputs = {"bounds", "markov_fit", "polarization"};
  } else if (name == "fig2-scaling") {
    c.bath.a_over_omega = 2.0;
    c.outputs = {"bounds", "scaling"};
  } else if (name == "fig3") {
    c.n_photons = 8;
    c.bath.N = 6;
    c.bath.a_over_omega = 4.0;
    c.hamiltonian = HamiltonianKind::Full;
    c.outputs = {"bounds", "trajectory_fit", "polarization"};
  } else {
    throw config_error("unknown recipe '" + name +
                       "'; expected fig2-upper, fig2-lower, fig2-scaling or "
                       "fig3");
  }
  return c;
}

}  // namespace cserr
