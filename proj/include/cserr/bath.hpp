#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cserr/common.hpp"
#include "cserr/operators.hpp"

namespace cserr {

// Spin environment description: site count, emitter Zeeman energy Omega
// (the energy unit of a run), total hyperfine coupling, and the per-site
// coupling profiles.
struct BathSpec {
  int N = 0;
  double omega = 1.0;            // emitter Zeeman energy
  double a_total = 0.0;          // sum_k A_k
  RVec a_k;                      // per-site hyperfine couplings, size N
  RVec omega_prime_k;            // shifted nuclear Zeeman energies omega'_k
  Eigen::MatrixXd b;             // dipolar coefficients, zero diagonal
  double dipolar_ratio = 0.0;    // sum_k' b_kk' / A_k (separable profile)
  double omega_ratio = 0.0;      // sum_k omega'_k / Omega_eff target

  void validate() const;
  // omega_k = omega'_k + A_k^2 / (4 Omega), used by the full Hamiltonian.
  RVec omega_k() const;
};

// Footnote profiles: A_k ~ exp[-(2k/N)^2] normalised to a_total,
// b_kk' ~ exp[-(2k/N)^2 - (2k'/N)^2] scaled so the separable-profile ratio
// sum_k' b_kk'/A_k equals dipolar_ratio for every k, uniform omega'_k with
// sum_k omega'_k = omega_ratio * Omega_eff. Omega_eff does not depend on
// omega'_k, so the normalisation needs no iteration; mean_overhauser is the
// <B_N> of the intended initial state (0 for the m = 0 mixture).
BathSpec gaussian_profiles(int N, double a_total, double dipolar_ratio,
                           double omega_ratio, double omega = 1.0,
                           double mean_overhauser = 0.0);

// Initial environment state: a pure vector, a weighted ensemble of pure
// vectors, or the uniform mixture over one spin sector.
struct EnvState {
  enum class Kind { PureVector, Ensemble, SectorUniform };

  Kind kind = Kind::SectorUniform;
  int N = 0;
  int sector_m = 0;  // SectorUniform only
  std::vector<std::pair<double, Vec>> members;  // PureVector / Ensemble

  static EnvState pure(int N, const Vec& v);
  // Bitstring "(s_N ... s_1)", site 1 rightmost, '0' = I^y eigenvalue +1.
  static EnvState pure_bits(int N, const std::string& bits);
  static EnvState ensemble(int N, std::vector<std::pair<double, Vec>> members);
  static EnvState sector_uniform(int N, int m);
  // The N = 0 environment (a single basis state the dynamics never touches).
  static EnvState trivial();

  std::int64_t dim() const { return 1ll << N; }
  void validate() const;

  // Materialises the state as weighted pure columns (a SectorUniform state
  // expands to its basis vectors with weight 1/rank).
  std::pair<Eigen::MatrixXcd, RVec> columns() const;

  // Weight carried in each y-projection sector, ordered by ascending m;
  // also reports whether any member coheres across sectors.
  std::pair<RVec, bool> sector_weights() const;

  // <diag> and variance-based spread for an operator diagonal in the basis.
  std::pair<double, double> diagonal_stats(const RVec& diag) const;
};

// The full hyperfine Hamiltonian, its pure-dephasing counterpart and the
// derived scalars.
struct HamiltonianSet {
  int N = 0;
  Mat h_full;     // joint space, 2^(N+1)
  Mat h_plus;     // environment space
  Mat h_minus;    // environment space
  double omega_eff = 0.0;
  double b_n_mean = 0.0;   // <B_N>
  double b_n_fluct = 0.0;  // Delta B_N
  double delta = 0.0;      // A / (Omega sqrt(N))

  // (Omega_eff/2) Y_D + |+i><+i| x H_+ + |-i><-i| x H_-
  Mat pd_joint() const;
};

// H = (Omega/2) Y_D + (1/2) sum_k omega_k I_k^y
//     + (1/4) sum_k A_k S.I_k + H_dip
Mat build_full_hamiltonian(const BathSpec& spec, int max_joint_qubits = 12);

// Overhauser operator diagonal B_N(e) = (1/2) sum_k A_k y_k(e).
RVec overhauser_diagonal(const BathSpec& spec);

// (<B_N>, Delta B_N) for the density operator implied by env.
std::pair<double, double> overhauser_stats(const BathSpec& spec,
                                           const EnvState& env);

// Builds H_+/H_-, Omega_eff, delta and (unless with_full is false, for
// dephasing-only runs on large environments) the full Hamiltonian.
HamiltonianSet build_dephasing_pair(const BathSpec& spec, const EnvState& env,
                                    int max_joint_qubits = 12,
                                    bool with_full = true);

// U_pm = exp[-i (pi/2 Omega_eff) H_pm], exponentiated per y-projection
// sector (H_pm conserve sum_k I_k^y, so the blocks decouple).
std::pair<Mat, Mat> u_pm_pair(const HamiltonianSet& set);

}  // namespace cserr
