#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cserr/bath.hpp"
#include "cserr/common.hpp"
#include "cserr/pattern.hpp"

namespace cserr {

// Exact error calculus on the joint (emitter x environment) space: the step
// unitary U, the non-unitary Delta, ordered W(alpha) products with prefix
// sharing, and a brute-force full-state oracle.

struct ErrorDistribution {
  int n = 0;
  RVec probs;          // P(alpha), index = pattern integer
  // Probabilities from the <-|_D matrix element. A dot Z is the stabilizer
  // partner of Z on photon n, so these satisfy (and are checked against)
  // dot_probs(alpha) = probs(alpha xor 2^(n-1)); the photon patterns alone
  // carry all the weight.
  RVec dot_probs;
  std::vector<int> h;  // fundamental error count per pattern
  RVec polarization;   // conditional <sum_k I_k^y>, NaN where P ~ 0
  std::string fingerprint;

  std::int64_t size() const { return probs.size(); }
  // |sum_alpha P(alpha) - 1|
  double normalization_residual() const;
  // max_alpha |dot_probs(alpha) - probs(alpha xor 2^(n-1))|
  double dot_fold_residual() const;
  // Clamps tiny negative values to 0 and values slightly above 1 to 1;
  // anything beyond kProbClamp is an invariant violation.
  void clamp();
};

struct EngineOptions {
  int max_photons = 12;
  bool share_prefixes = true;
  // Restrict the product tree to the environment sector of a SectorUniform
  // state when U does not leak out of it (always the case for the
  // pure-dephasing step unitary).
  bool sector_restriction = true;
};

// U = exp[-i pi/(2 Omega_eff) H] on the joint space.
Mat step_unitary(const Mat& h_joint, double omega_eff);

// The pure-dephasing step unitary assembled from the sector-blocked U_pm:
// U = |+i><+i| x (e^{-i pi/4} U_+) + |-i><-i| x (e^{+i pi/4} U_-).
Mat pd_step_unitary(const HamiltonianSet& set);

// Delta = (1/sqrt2)(U - 2 |0><0|_D U |1><1|_D).
Mat delta_op(const Mat& u);

// O_+ = sqrt2 <+|_D W(alpha) |0>_D and the complement O_- = sqrt2 <-|_D
// W(alpha) |0>_D, with W(alpha) = (Z^{alpha_n} Delta) ... (Z^{alpha_1} Delta).
std::pair<Mat, Mat> error_operator(Pattern alpha, int n, const Mat& delta);

// All 2^n probabilities for the given step unitary and initial environment
// state. A trivial environment is a PureVector EnvState with N = 0.
ErrorDistribution distribution(const Mat& u, const EnvState& env, int n,
                               const EngineOptions& opts = {});

// Environment polarization conditioned on measuring pattern alpha.
double conditional_polarization(Pattern alpha, int n, const Mat& delta,
                                const EnvState& env);

// Explicit state-vector evolution of emitter x photons x environment,
// projected onto the Z-pattern graph-state basis. The independent check of
// distribution().
ErrorDistribution brute_force_oracle(const Mat& u, const EnvState& env, int n,
                                     int max_total_qubits = 14);

// Amplitudes of the ideal cluster state |C_n> over (dot, photons).
Vec ideal_cluster_amplitudes(int n);

// Ideal circuit with one emitter Pauli inserted before the rotation of step
// l; returns the resulting Z-pattern distribution. Used to pin down the
// fundamental-error -> photonic-error mapping.
ErrorDistribution ideal_insertion_distribution(int n, int l, Axis pauli);

}  // namespace cserr
