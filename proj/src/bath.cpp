#include "cserr/bath.hpp"

#include <cmath>
#include <numbers>

namespace cserr {

void BathSpec::validate() const {
  if (N < 1) throw config_error("BathSpec: N must be >= 1");
  if (omega <= 0.0) throw config_error("BathSpec: Omega must be > 0");
  if (a_k.size() != N || omega_prime_k.size() != N)
    throw config_error("BathSpec: profile sizes do not match N");
  if (b.rows() != N || b.cols() != N)
    throw config_error("BathSpec: dipolar matrix must be N x N");
  double sum = 0.0;
  for (int k = 0; k < N; ++k) {
    if (a_total > 0.0 && a_k(k) <= 0.0)
      throw config_error("BathSpec: all A_k must be > 0");
    sum += a_k(k);
  }
  const double scale = std::max(1.0, std::abs(a_total));
  if (std::abs(sum - a_total) > 1e-12 * scale)
    throw config_error("BathSpec: sum A_k != A_total");
  for (int k = 0; k < N; ++k) {
    if (b(k, k) != 0.0) throw config_error("BathSpec: b diagonal must be 0");
    for (int j = 0; j < N; ++j)
      if (b(k, j) != b(j, k))
        throw config_error("BathSpec: b must be symmetric");
  }
}

RVec BathSpec::omega_k() const {
  RVec out(N);
  for (int k = 0; k < N; ++k)
    out(k) = omega_prime_k(k) + a_k(k) * a_k(k) / (4.0 * omega);
  return out;
}

BathSpec gaussian_profiles(int N, double a_total, double dipolar_ratio,
                           double omega_ratio, double omega,
                           double mean_overhauser) {
  if (N < 1) throw config_error("gaussian_profiles: N must be >= 1");
  if (a_total < 0.0) throw config_error("gaussian_profiles: A_total < 0");
  if (omega <= 0.0) throw config_error("gaussian_profiles: Omega must be > 0");

  BathSpec spec;
  spec.N = N;
  spec.omega = omega;
  spec.a_total = a_total;
  spec.dipolar_ratio = dipolar_ratio;
  spec.omega_ratio = omega_ratio;

  RVec g(N);
  double g_sum = 0.0;
  for (int k = 1; k <= N; ++k) {
    const double x = 2.0 * k / N;
    g(k - 1) = std::exp(-x * x);
    g_sum += g(k - 1);
  }
  spec.a_k = (a_total / g_sum) * g;

  // Separable profile b_kk' = beta g_k g_k'. The stated ratio
  // sum_k' b_kk'/A_k is k-independent only when the formal k' = k term is
  // included, so beta is fixed from the full separable sum; the stored
  // matrix keeps a zero diagonal (H_dip runs over k != k').
  spec.b = Eigen::MatrixXd::Zero(N, N);
  if (a_total > 0.0 && dipolar_ratio != 0.0) {
    const double beta = dipolar_ratio * a_total / (g_sum * g_sum);
    for (int k = 0; k < N; ++k)
      for (int j = 0; j < k; ++j)
        spec.b(k, j) = spec.b(j, k) = beta * g(k) * g(j);
  }

  // Omega_eff does not depend on omega'_k: fix the sum against the
  // omega'-independent part and spread it uniformly.
  double a_sq = 0.0;
  for (int k = 0; k < N; ++k) a_sq += spec.a_k(k) * spec.a_k(k);
  const double omega_eff0 = omega + mean_overhauser + 0.25 * a_sq / omega;
  spec.omega_prime_k = RVec::Constant(N, omega_ratio * omega_eff0 / N);

  spec.validate();
  return spec;
}

EnvState EnvState::pure(int N, const Vec& v) {
  EnvState env;
  env.kind = Kind::PureVector;
  env.N = N;
  env.members.emplace_back(1.0, v);
  env.validate();
  return env;
}

EnvState EnvState::pure_bits(int N, const std::string& bits) {
  if (static_cast<int>(bits.size()) != N)
    throw config_error("EnvState: bitstring length != N");
  std::int64_t idx = 0;
  for (int k = 1; k <= N; ++k) {
    const char c = bits[N - k];  // site 1 is the rightmost character
    if (c != '0' && c != '1')
      throw config_error("EnvState: bitstring must contain only 0/1");
    if (c == '1') idx |= (1ll << (k - 1));
  }
  Vec v = Vec::Zero(1ll << N);
  v(idx) = 1.0;
  return pure(N, v);
}

EnvState EnvState::ensemble(int N, std::vector<std::pair<double, Vec>> m) {
  EnvState env;
  env.kind = Kind::Ensemble;
  env.N = N;
  env.members = std::move(m);
  env.validate();
  return env;
}

EnvState EnvState::sector_uniform(int N, int m) {
  EnvState env;
  env.kind = Kind::SectorUniform;
  env.N = N;
  env.sector_m = m;
  env.validate();
  return env;
}

EnvState EnvState::trivial() {
  Vec one(1);
  one(0) = 1.0;
  return pure(0, one);
}

void EnvState::validate() const {
  if (N < 0) throw config_error("EnvState: N must be >= 0");
  if (kind == Kind::SectorUniform) {
    if (N < 1) throw config_error("EnvState: sector state needs N >= 1");
    if (std::abs(sector_m) > N || ((N + sector_m) % 2) != 0)
      throw config_error("EnvState: sector m = " + std::to_string(sector_m) +
                         " invalid for N = " + std::to_string(N));
    return;
  }
  if (members.empty()) throw config_error("EnvState: no ensemble members");
  double wsum = 0.0;
  for (const auto& [w, v] : members) {
    if (w < 0.0) throw config_error("EnvState: negative ensemble weight");
    wsum += w;
    if (v.size() != dim())
      throw config_error("EnvState: member dimension != 2^N");
    if (std::abs(v.norm() - 1.0) > 1e-10)
      throw config_error("EnvState: member vector not normalised");
  }
  if (std::abs(wsum - 1.0) > 1e-12)
    throw config_error("EnvState: ensemble weights must sum to 1");
}

std::pair<Eigen::MatrixXcd, RVec> EnvState::columns() const {
  if (kind == Kind::SectorUniform) {
    const auto sectors = sector_projectors(N);
    const auto& sec = sector_with_m(sectors, sector_m);
    Mat cols = Mat::Zero(dim(), sec.rank());
    for (int j = 0; j < sec.rank(); ++j) cols(sec.basis_indices[j], j) = 1.0;
    return {cols, RVec::Constant(sec.rank(), 1.0 / sec.rank())};
  }
  Mat cols(dim(), members.size());
  RVec w(members.size());
  for (std::size_t j = 0; j < members.size(); ++j) {
    cols.col(j) = members[j].second;
    w(j) = members[j].first;
  }
  return {cols, w};
}

std::pair<RVec, bool> EnvState::sector_weights() const {
  RVec w = RVec::Zero(N + 1);
  bool coherent = false;
  if (kind == Kind::SectorUniform) {
    w((sector_m + N) / 2) = 1.0;
    return {w, false};
  }
  for (const auto& [weight, v] : members) {
    RVec per = RVec::Zero(N + 1);
    for (std::int64_t idx = 0; idx < v.size(); ++idx) {
      const double p = std::norm(v(idx));
      if (p > 0.0) per((sector_of_index(idx, N) + N) / 2) += p;
    }
    int occupied = 0;
    for (int s = 0; s <= N; ++s)
      if (per(s) > 1e-24) ++occupied;
    if (occupied > 1) coherent = true;
    w += weight * per;
  }
  return {w, coherent};
}

std::pair<double, double> EnvState::diagonal_stats(const RVec& diag) const {
  double mean = 0.0, second = 0.0;
  if (kind == Kind::SectorUniform) {
    const auto sectors = sector_projectors(N);
    const auto& sec = sector_with_m(sectors, sector_m);
    for (int idx : sec.basis_indices) {
      mean += diag(idx);
      second += diag(idx) * diag(idx);
    }
    mean /= sec.rank();
    second /= sec.rank();
  } else {
    for (const auto& [w, v] : members) {
      for (std::int64_t idx = 0; idx < v.size(); ++idx) {
        const double p = std::norm(v(idx));
        if (p == 0.0) continue;
        mean += w * p * diag(idx);
        second += w * p * diag(idx) * diag(idx);
      }
    }
  }
  const double var = std::max(0.0, second - mean * mean);
  return {mean, std::sqrt(var)};
}

Mat HamiltonianSet::pd_joint() const {
  const std::int64_t dim_e = 1ll << N;
  Mat plus_i = Mat::Zero(2, 2);   // |+i><+i|
  plus_i << 0.5, cx(0, -0.5), cx(0, 0.5), 0.5;
  Mat minus_i = Mat::Zero(2, 2);  // |-i><-i|
  minus_i << 0.5, cx(0, 0.5), cx(0, -0.5), 0.5;
  Mat h = kron(plus_i, h_plus) + kron(minus_i, h_minus);
  Mat y_env = kron(dot_matrix(Axis::Y), Mat::Identity(dim_e, dim_e));
  h += (omega_eff / 2.0) * y_env;
  return h;
}

namespace {

// H_dip = sum_{k != k'} b_kk' (I_k^+ I_k'^- - (1/2) I_k^y I_k'^y), added on
// the environment bits of `h` (bit k-1 = site k).
void add_dipolar(Mat& h, const BathSpec& spec) {
  const Mat ip = site_matrix(Axis::Plus);
  const Mat im = site_matrix(Axis::Minus);
  const Mat iy = site_matrix(Axis::Y);
  for (int k = 0; k < spec.N; ++k)
    for (int j = 0; j < spec.N; ++j) {
      if (j == k || spec.b(k, j) == 0.0) continue;
      add_embedded_pair(h, ip, k, im, j, spec.b(k, j));
      add_embedded_pair(h, iy, k, iy, j, -0.5 * spec.b(k, j));
    }
}

}  // namespace

Mat build_full_hamiltonian(const BathSpec& spec, int max_joint_qubits) {
  spec.validate();
  if (spec.N + 1 > max_joint_qubits)
    throw resource_error("build_full_hamiltonian: N + 1 = " +
                         std::to_string(spec.N + 1) + " qubits exceeds limit " +
                         std::to_string(max_joint_qubits));
  const int dot_bit = spec.N;  // joint index = d * 2^N + e
  const std::int64_t dim = 1ll << (spec.N + 1);
  Mat h = Mat::Zero(dim, dim);

  add_embedded(h, dot_matrix(Axis::Y), dot_bit, spec.omega / 2.0);

  const RVec omega_k = spec.omega_k();
  for (int k = 0; k < spec.N; ++k) {
    add_embedded(h, site_matrix(Axis::Y), k, 0.5 * omega_k(k));
    const double c = 0.25 * spec.a_k(k);
    add_embedded_pair(h, dot_matrix(Axis::X), dot_bit, site_matrix(Axis::X), k,
                      c);
    add_embedded_pair(h, dot_matrix(Axis::Y), dot_bit, site_matrix(Axis::Y), k,
                      c);
    add_embedded_pair(h, dot_matrix(Axis::Z), dot_bit, site_matrix(Axis::Z), k,
                      c);
  }
  add_dipolar(h, spec);
  require_hermitian(h, kHermTol, "build_full_hamiltonian");
  return h;
}

RVec overhauser_diagonal(const BathSpec& spec) {
  const std::int64_t dim = 1ll << spec.N;
  RVec diag(dim);
  for (std::int64_t idx = 0; idx < dim; ++idx) {
    double v = 0.0;
    for (int k = 0; k < spec.N; ++k)
      v += spec.a_k(k) * ((idx >> k) & 1 ? -1.0 : 1.0);
    diag(idx) = 0.5 * v;
  }
  return diag;
}

std::pair<double, double> overhauser_stats(const BathSpec& spec,
                                           const EnvState& env) {
  spec.validate();
  env.validate();
  if (env.N != spec.N)
    throw config_error("overhauser_stats: environment size mismatch");
  return env.diagonal_stats(overhauser_diagonal(spec));
}

HamiltonianSet build_dephasing_pair(const BathSpec& spec, const EnvState& env,
                                    int max_joint_qubits, bool with_full) {
  spec.validate();
  env.validate();
  if (env.N != spec.N)
    throw config_error("build_dephasing_pair: environment size mismatch");

  HamiltonianSet set;
  set.N = spec.N;
  const auto [b_mean, b_fluct] = overhauser_stats(spec, env);
  set.b_n_mean = b_mean;
  set.b_n_fluct = b_fluct;

  double a_sq = 0.0;
  for (int k = 0; k < spec.N; ++k) a_sq += spec.a_k(k) * spec.a_k(k);
  set.omega_eff = spec.omega + b_mean + 0.25 * a_sq / spec.omega;
  set.delta = spec.a_total / (spec.omega * std::sqrt(spec.N));

  const std::int64_t dim_e = 1ll << spec.N;
  for (int sign : {+1, -1}) {
    Mat h = Mat::Zero(dim_e, dim_e);
    h.diagonal().array() += cx(-sign * 0.5 * b_mean, 0.0);
    for (int k = 0; k < spec.N; ++k)
      add_embedded(h, site_matrix(Axis::Y), k,
                   0.5 * (spec.omega_prime_k(k) + sign * 0.5 * spec.a_k(k)));
    const Mat ip = site_matrix(Axis::Plus);
    const Mat im = site_matrix(Axis::Minus);
    for (int k = 0; k < spec.N; ++k)
      for (int j = 0; j < spec.N; ++j) {
        if (j == k) continue;
        const double c =
            sign * 0.25 * spec.a_k(k) * spec.a_k(j) / spec.omega;
        add_embedded_pair(h, ip, k, im, j, c);
      }
    add_dipolar(h, spec);
    require_hermitian(h, kHermTol, "build_dephasing_pair");
    (sign > 0 ? set.h_plus : set.h_minus) = std::move(h);
  }

  if (with_full) set.h_full = build_full_hamiltonian(spec, max_joint_qubits);
  return set;
}

std::pair<Mat, Mat> u_pm_pair(const HamiltonianSet& set) {
  const double theta = std::numbers::pi / (2.0 * set.omega_eff);
  const auto sectors = sector_projectors(set.N);
  const std::int64_t dim_e = 1ll << set.N;
  Mat u_plus = Mat::Zero(dim_e, dim_e);
  Mat u_minus = Mat::Zero(dim_e, dim_e);
  for (const auto& sec : sectors) {
    for (int sign : {+1, -1}) {
      const Mat& h = sign > 0 ? set.h_plus : set.h_minus;
      Mat& u = sign > 0 ? u_plus : u_minus;
      const Mat block = evolve_unitary(sector_block(h, sec), theta);
      for (int i = 0; i < sec.rank(); ++i)
        for (int j = 0; j < sec.rank(); ++j)
          u(sec.basis_indices[i], sec.basis_indices[j]) = block(i, j);
    }
  }
  return {u_plus, u_minus};
}

}  // namespace cserr
