#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cserr/bath.hpp"
#include "cserr/bounds.hpp"
#include "cserr/engine.hpp"
#include "cserr/models.hpp"
#include "cserr/operators.hpp"
#include "cserr/pattern.hpp"
#include "cserr/runner.hpp"

namespace py = pybind11;
using namespace cserr;

namespace {

Axis parse_axis(const std::string& s) {
  if (s == "x") return Axis::X;
  if (s == "y") return Axis::Y;
  if (s == "z") return Axis::Z;
  if (s == "plus" || s == "+") return Axis::Plus;
  if (s == "minus" || s == "-") return Axis::Minus;
  throw config_error("axis must be x, y, z, plus or minus");
}

EnvState make_env_state(int N, const py::object& spec) {
  if (py::isinstance<py::int_>(spec))
    return EnvState::sector_uniform(N, spec.cast<int>());
  if (py::isinstance<py::str>(spec))
    return EnvState::pure_bits(N, spec.cast<std::string>());
  if (py::isinstance<EnvState>(spec)) return spec.cast<EnvState>();
  throw config_error(
      "env must be a sector m (int), a bitstring, or an EnvState");
}

py::dict dist_to_dict(const ErrorDistribution& d) {
  py::dict out;
  out["n"] = d.n;
  out["probs"] = d.probs;
  out["dot_probs"] = d.dot_probs;
  out["h"] = d.h;
  out["polarization"] = d.polarization;
  return out;
}

py::dict fit_to_dict(const FitReport& f) {
  py::dict out;
  for (const auto& [k, v] : f.params) out[py::str(k)] = v;
  out["objective"] = f.objective;
  out["residuals"] = f.residuals;
  out["bound_violations"] = f.bound_violations;
  out["attainable"] = f.attainable;
  out["note"] = f.note;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "error distributions on emitter-generated photonic cluster "
            "states coupled to a spin environment";

  py::register_exception<config_error>(m, "ConfigError",
                                       PyExc_ValueError);
  py::register_exception<invariant_error>(m, "InvariantError",
                                          PyExc_RuntimeError);
  py::register_exception<resource_error>(m, "ResourceError",
                                         PyExc_RuntimeError);

  py::class_<BathSpec>(m, "BathSpec")
      .def_readonly("N", &BathSpec::N)
      .def_readonly("omega", &BathSpec::omega)
      .def_readonly("a_total", &BathSpec::a_total)
      .def_readonly("a_k", &BathSpec::a_k)
      .def_readonly("omega_prime_k", &BathSpec::omega_prime_k)
      .def_readonly("b", &BathSpec::b)
      .def_readonly("dipolar_ratio", &BathSpec::dipolar_ratio)
      .def_readonly("omega_ratio", &BathSpec::omega_ratio);

  py::class_<EnvState>(m, "EnvState")
      .def_static("pure", &EnvState::pure, py::arg("N"), py::arg("vector"))
      .def_static("pure_bits", &EnvState::pure_bits, py::arg("N"),
                  py::arg("bits"))
      .def_static("sector_uniform", &EnvState::sector_uniform, py::arg("N"),
                  py::arg("m"))
      .def_static("trivial", &EnvState::trivial)
      .def_readonly("N", &EnvState::N);

  py::class_<HamiltonianSet>(m, "HamiltonianSet")
      .def_readonly("N", &HamiltonianSet::N)
      .def_readonly("h_full", &HamiltonianSet::h_full)
      .def_readonly("h_plus", &HamiltonianSet::h_plus)
      .def_readonly("h_minus", &HamiltonianSet::h_minus)
      .def_readonly("omega_eff", &HamiltonianSet::omega_eff)
      .def_readonly("b_n_mean", &HamiltonianSet::b_n_mean)
      .def_readonly("b_n_fluct", &HamiltonianSet::b_n_fluct)
      .def_readonly("delta", &HamiltonianSet::delta)
      .def("pd_joint", &HamiltonianSet::pd_joint);

  m.def("site_operator",
        [](const std::string& axis, int k, int N) {
          return site_operator(parse_axis(axis), k, N);
        },
        py::arg("axis"), py::arg("k"), py::arg("N"));
  m.def("hermitian_eig",
        [](const Mat& h) {
          const auto r = hermitian_eig(h);
          return py::make_tuple(r.values, r.vectors);
        },
        py::arg("h"));
  m.def("evolve_unitary",
        [](const Mat& h, double theta) { return evolve_unitary(h, theta); },
        py::arg("h"), py::arg("theta"));
  m.def("psd_norm", &psd_norm, py::arg("a"));
  m.def("sector_ranks", [](int N) {
    std::vector<std::pair<int, int>> out;
    for (const auto& p : sector_projectors(N)) out.emplace_back(p.m, p.rank());
    return out;
  });

  m.def("gaussian_profiles", &gaussian_profiles, py::arg("N"),
        py::arg("a_total"), py::arg("dipolar_ratio") = 2500.0,
        py::arg("omega_ratio") = 1e-3, py::arg("omega") = 1.0,
        py::arg("mean_overhauser") = 0.0);
  m.def("build_full_hamiltonian",
        [](const BathSpec& s) { return build_full_hamiltonian(s); },
        py::arg("spec"));
  m.def("build_dephasing_pair",
        [](const BathSpec& s, int N, const py::object& env, bool with_full) {
          return build_dephasing_pair(s, make_env_state(N, env), 12,
                                      with_full);
        },
        py::arg("spec"), py::arg("N"), py::arg("env"),
        py::arg("with_full") = true);
  m.def("overhauser_stats",
        [](const BathSpec& s, int N, const py::object& env) {
          return overhauser_stats(s, make_env_state(N, env));
        },
        py::arg("spec"), py::arg("N"), py::arg("env"));

  m.def("step_unitary", &step_unitary, py::arg("h_joint"),
        py::arg("omega_eff"));
  m.def("pd_step_unitary", &pd_step_unitary, py::arg("set"));
  m.def("delta_op", &delta_op, py::arg("u"));
  m.def("error_operator", &error_operator, py::arg("alpha"), py::arg("n"),
        py::arg("delta"));
  m.def("distribution",
        [](const Mat& u, int N, const py::object& env, int n) {
          return dist_to_dict(distribution(u, make_env_state(N, env), n));
        },
        py::arg("u"), py::arg("N"), py::arg("env"), py::arg("n"));
  m.def("brute_force_oracle",
        [](const Mat& u, int N, const py::object& env, int n) {
          return dist_to_dict(brute_force_oracle(u, make_env_state(N, env),
                                                 n));
        },
        py::arg("u"), py::arg("N"), py::arg("env"), py::arg("n"));
  m.def("conditional_polarization",
        [](Pattern alpha, int n, const Mat& delta, int N,
           const py::object& env) {
          return conditional_polarization(alpha, n, delta,
                                          make_env_state(N, env));
        },
        py::arg("alpha"), py::arg("n"), py::arg("delta"), py::arg("N"),
        py::arg("env"));

  m.def("h_count", [](Pattern alpha, int n) {
    const auto hc = h_count(alpha, n);
    return py::make_tuple(hc.f, hc.h);
  });
  m.def("pattern_to_string", &pattern_to_string);
  m.def("string_to_pattern", &string_to_pattern);
  m.def("m_operators", &m_operators, py::arg("u_plus"), py::arg("u_minus"));
  m.def("u_pm_pair", &u_pm_pair, py::arg("set"));
  m.def("pd_error_operator", &pd_error_operator, py::arg("alpha"),
        py::arg("n"), py::arg("m_plus"), py::arg("m_minus"));
  m.def("bound_eq5", &bound_eq5, py::arg("alpha"), py::arg("n"),
        py::arg("p_plus"), py::arg("p_minus"));
  m.def("compute_bounds",
        [](int n, const HamiltonianSet& set, int N, const py::object& env) {
          const auto b = compute_bounds(n, set, make_env_state(N, env));
          py::dict out;
          out["p_plus"] = b.p_plus;
          out["p_minus"] = b.p_minus;
          out["p_plus_sector"] = b.p_plus_sector;
          out["p_minus_sector"] = b.p_minus_sector;
          out["eq5"] = b.eq5;
          out["eq6"] = b.eq6;
          out["multi_sector"] = b.multi_sector;
          return out;
        },
        py::arg("n"), py::arg("set"), py::arg("N"), py::arg("env"));

  m.def("markov_prob", &markov_prob, py::arg("p"), py::arg("alpha"),
        py::arg("n"));
  m.def("markov_model_probs", &markov_model_probs, py::arg("p"), py::arg("n"));
  m.def("fit_markov",
        [](const py::dict& dist, const std::string& mode) {
          ErrorDistribution d;
          d.n = dist["n"].cast<int>();
          d.probs = dist["probs"].cast<RVec>();
          d.dot_probs = dist["dot_probs"].cast<RVec>();
          d.h = dist["h"].cast<std::vector<int>>();
          d.polarization = dist["polarization"].cast<RVec>();
          return fit_to_dict(fit_markov(
              d, mode == "bounding" ? MarkovFitMode::Bounding
                                    : MarkovFitMode::LeastSquaresLog));
        },
        py::arg("dist"), py::arg("mode") = "least_squares_log");
  m.def("trajectory_distribution",
        [](double px, double py_, double pz, int n) {
          return trajectory_distribution(TrajectoryModel{px, py_, pz, n});
        },
        py::arg("p_x"), py::arg("p_y"), py::arg("p_z"), py::arg("n"));
  m.def("fit_trajectory",
        [](const py::dict& dist) {
          ErrorDistribution d;
          d.n = dist["n"].cast<int>();
          d.probs = dist["probs"].cast<RVec>();
          d.dot_probs = dist["dot_probs"].cast<RVec>();
          d.h = dist["h"].cast<std::vector<int>>();
          d.polarization = dist["polarization"].cast<RVec>();
          return fit_to_dict(fit_trajectory(d));
        },
        py::arg("dist"));
  m.def("scaling_fit",
        [](const std::vector<std::pair<double, double>>& pts,
           const std::string& form) {
          return fit_to_dict(scaling_fit(pts, form == "bound"
                                                  ? ScalingForm::Bound
                                                  : ScalingForm::Exact));
        },
        py::arg("points"), py::arg("form") = "exact");

  m.def("run_config_json",
        [](const std::string& text, const std::string& out_dir,
           bool plot_data) {
          const RunConfig config = RunConfig::from_json_string(text);
          const RunResult result = run(config);
          std::vector<std::string> files;
          for (const auto& f : write_outputs(result, out_dir, plot_data))
            files.push_back(f.string());
          py::dict out;
          out["omega_eff"] = result.omega_eff;
          out["delta"] = result.delta;
          out["normalization_residual"] =
              result.dist.normalization_residual();
          out["files"] = files;
          return out;
        },
        py::arg("config_json"), py::arg("out_dir"),
        py::arg("plot_data") = false);
  m.def("reproduce_config_json", [](const std::string& name) {
    return reproduce_config(name).to_json_string(2);
  });
}
