#include "cserr/engine.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace cserr {

namespace {

constexpr double kSectorLeakTol = 1e-12;
constexpr double kConditionalFloor = 1e-14;

int log2_exact(std::int64_t dim, const char* what) {
  if (!is_power_of_two(dim))
    throw config_error(std::string(what) + ": dimension is not a power of 2");
  int bits = 0;
  while ((1ll << bits) < dim) ++bits;
  return bits;
}

// Depth-first walk over the prefix-shared product tree. Each node applies
// Delta once; the bit-1 child reuses the product with the dot-Z sign flip.
class ProductWalk {
 public:
  ProductWalk(const Mat& delta, const RVec& weights, const RVec& m_diag,
              int n)
      : delta_(delta),
        weights_(weights),
        m_diag_(m_diag),
        n_(n),
        env_dim_(static_cast<int>(delta.rows() / 2)) {
    const auto dim = 1ll << n;
    probs = RVec::Zero(dim);
    dot_probs = RVec::Zero(dim);
    polar_num = RVec::Zero(dim);
  }

  void run_shared(const Mat& root) { walk(0, 0, root); }

  void run_naive(const Mat& root) {
    for (Pattern alpha = 0; alpha < (1u << n_); ++alpha) {
      Mat block = root;
      for (int i = 1; i <= n_; ++i) {
        Mat next = delta_ * block;
        if (pattern_bit(alpha, i)) next.bottomRows(env_dim_) *= -1.0;
        block = std::move(next);
      }
      leaf(alpha, block);
    }
  }

  RVec probs, dot_probs, polar_num;

 private:
  void walk(int depth, Pattern prefix, const Mat& block) {
    if (depth == n_) {
      leaf(prefix, block);
      return;
    }
    Mat next = delta_ * block;
    walk(depth + 1, prefix, next);
    next.bottomRows(env_dim_) *= -1.0;
    walk(depth + 1, prefix | (1u << depth), next);
  }

  void leaf(Pattern alpha, const Mat& block) {
    const Mat plus = block.topRows(env_dim_) + block.bottomRows(env_dim_);
    const Mat minus = block.topRows(env_dim_) - block.bottomRows(env_dim_);
    double p = 0.0, q = 0.0, pol = 0.0;
    for (Eigen::Index j = 0; j < plus.cols(); ++j) {
      const double w = weights_(j);
      p += w * plus.col(j).squaredNorm();
      q += w * minus.col(j).squaredNorm();
      for (Eigen::Index r = 0; r < plus.rows(); ++r)
        pol += w * m_diag_(r) * std::norm(plus(r, j));
    }
    probs(alpha) = p;
    dot_probs(alpha) = q;
    polar_num(alpha) = pol;
  }

  const Mat& delta_;
  const RVec& weights_;
  const RVec& m_diag_;
  int n_;
  int env_dim_;
};

Mat slice(const Mat& a, const std::vector<int>& rows,
          const std::vector<int>& cols) {
  Mat out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out(i, j) = a(rows[i], cols[j]);
  return out;
}

}  // namespace

double ErrorDistribution::normalization_residual() const {
  return std::abs(probs.sum() - 1.0);
}

double ErrorDistribution::dot_fold_residual() const {
  const Pattern top = 1u << (n - 1);
  double worst = 0.0;
  for (Pattern alpha = 0; alpha < static_cast<Pattern>(probs.size()); ++alpha)
    worst = std::max(worst, std::abs(dot_probs(alpha) - probs(alpha ^ top)));
  return worst;
}

void ErrorDistribution::clamp() {
  for (RVec* v : {&probs, &dot_probs}) {
    for (Eigen::Index i = 0; i < v->size(); ++i) {
      double& p = (*v)(i);
      if (p < -kProbClamp || p > 1.0 + kProbClamp)
        throw invariant_error("probability out of range: " +
                              std::to_string(p));
      p = std::min(1.0, std::max(0.0, p));
    }
  }
}

Mat step_unitary(const Mat& h_joint, double omega_eff) {
  if (omega_eff <= 0.0) throw config_error("step_unitary: Omega_eff <= 0");
  return evolve_unitary(h_joint, std::numbers::pi / (2.0 * omega_eff));
}

Mat pd_step_unitary(const HamiltonianSet& set) {
  const auto [u_plus, u_minus] = u_pm_pair(set);
  const cx quarter = std::exp(cx(0, -std::numbers::pi / 4.0));
  Mat plus_i(2, 2), minus_i(2, 2);
  plus_i << 0.5, cx(0, -0.5), cx(0, 0.5), 0.5;
  minus_i << 0.5, cx(0, 0.5), cx(0, -0.5), 0.5;
  return kron(plus_i, quarter * u_plus) +
         kron(minus_i, std::conj(quarter) * u_minus);
}

Mat delta_op(const Mat& u) {
  if (u.rows() != u.cols() || u.rows() % 2 != 0)
    throw config_error("delta_op: joint operator must be square, even dim");
  const Eigen::Index dim_e = u.rows() / 2;
  Mat delta = u / std::numbers::sqrt2;
  delta.topRightCorner(dim_e, dim_e) *= -1.0;
  return delta;
}

std::pair<Mat, Mat> error_operator(Pattern alpha, int n, const Mat& delta) {
  const Eigen::Index dim_e = delta.rows() / 2;
  Mat w = Mat::Identity(delta.rows(), delta.cols());
  for (int i = 1; i <= n; ++i) {
    Mat next = delta * w;
    if (pattern_bit(alpha, i)) next.bottomRows(dim_e) *= -1.0;
    w = std::move(next);
  }
  const Mat w00 = w.topLeftCorner(dim_e, dim_e);
  const Mat w10 = w.bottomLeftCorner(dim_e, dim_e);
  return {w00 + w10, w00 - w10};
}

ErrorDistribution distribution(const Mat& u, const EnvState& env, int n,
                               const EngineOptions& opts) {
  if (n < 1) throw config_error("distribution: n must be >= 1");
  if (n > opts.max_photons)
    throw resource_error("distribution: n = " + std::to_string(n) +
                         " exceeds limit " + std::to_string(opts.max_photons));
  const std::int64_t dim_e = u.rows() / 2;
  if (u.rows() != u.cols() || u.rows() != 2 * dim_e)
    throw config_error("distribution: U must be square with even dimension");
  const int N = log2_exact(dim_e, "distribution");
  if (env.N != N) throw config_error("distribution: environment/U mismatch");

  const auto [cols, weights] = env.columns();

  // Environment support restriction: a SectorUniform state stays inside its
  // sector whenever U commutes with sum_k I_k^y on the environment factor.
  std::vector<int> support;
  if (env.kind == EnvState::Kind::SectorUniform && opts.sector_restriction) {
    const auto sectors = sector_projectors(N);
    const auto& sec = sector_with_m(sectors, env.sector_m);
    std::vector<char> in_sec(2 * dim_e, 0);
    for (int e : sec.basis_indices) {
      in_sec[e] = 1;
      in_sec[e + dim_e] = 1;
    }
    double leak = 0.0;
    for (std::int64_t col = 0; col < 2 * dim_e; ++col) {
      if (!in_sec[col]) continue;
      for (std::int64_t row = 0; row < 2 * dim_e; ++row)
        if (!in_sec[row]) leak = std::max(leak, std::abs(u(row, col)));
    }
    if (leak <= kSectorLeakTol) support = sec.basis_indices;
  }

  Mat delta_r;
  Mat root;
  RVec m_diag;
  if (!support.empty()) {
    std::vector<int> joint(2 * support.size());
    for (std::size_t i = 0; i < support.size(); ++i) {
      joint[i] = support[i];
      joint[i + support.size()] = support[i] + static_cast<int>(dim_e);
    }
    delta_r = delta_op(slice(u, joint, joint));
    root = Mat::Zero(2 * support.size(), cols.cols());
    for (std::size_t i = 0; i < support.size(); ++i)
      root.row(i) = cols.row(support[i]);
    m_diag = RVec(support.size());
    for (std::size_t i = 0; i < support.size(); ++i)
      m_diag(i) = sector_of_index(support[i], N);
  } else {
    delta_r = delta_op(u);
    root = Mat::Zero(2 * dim_e, cols.cols());
    root.topRows(dim_e) = cols;
    m_diag = RVec(dim_e);
    for (std::int64_t e = 0; e < dim_e; ++e)
      m_diag(e) = sector_of_index(e, N);
  }

  ProductWalk walk(delta_r, weights, m_diag, n);
  if (opts.share_prefixes)
    walk.run_shared(root);
  else
    walk.run_naive(root);

  ErrorDistribution dist;
  dist.n = n;
  dist.probs = walk.probs;
  dist.dot_probs = walk.dot_probs;
  dist.h.resize(1ll << n);
  dist.polarization = RVec::Constant(1ll << n,
                                     std::numeric_limits<double>::quiet_NaN());
  for (Pattern alpha = 0; alpha < (1u << n); ++alpha) {
    dist.h[alpha] = h_count(alpha, n).h;
    if (walk.probs(alpha) > kConditionalFloor)
      dist.polarization(alpha) = walk.polar_num(alpha) / walk.probs(alpha);
  }
  dist.clamp();
  if (dist.normalization_residual() > kProbTol)
    throw invariant_error("distribution: probabilities violate completeness, "
                          "residual = " +
                          std::to_string(dist.normalization_residual()));
  return dist;
}

double conditional_polarization(Pattern alpha, int n, const Mat& delta,
                                const EnvState& env) {
  const Eigen::Index dim_e = delta.rows() / 2;
  const int N = log2_exact(dim_e, "conditional_polarization");
  if (env.N != N)
    throw config_error("conditional_polarization: environment mismatch");
  const auto [o_plus, o_minus] = error_operator(alpha, n, delta);
  const auto [cols, weights] = env.columns();
  double p = 0.0, num = 0.0;
  for (Eigen::Index j = 0; j < cols.cols(); ++j) {
    const Vec v = o_plus * cols.col(j);
    p += weights(j) * v.squaredNorm();
    for (std::int64_t e = 0; e < dim_e; ++e)
      num += weights(j) * sector_of_index(e, N) * std::norm(v(e));
  }
  if (p <= kConditionalFloor)
    throw invariant_error(
        "conditional_polarization: pattern probability below threshold, "
        "conditional undefined");
  return num / p;
}

namespace {

// Applies the joint step unitary to the (dot, environment) factors of the
// full state for every photon configuration.
void apply_joint(Vec& psi, const Mat& u, int n, int N) {
  const std::int64_t dim_e = 1ll << N;
  const std::int64_t photons = 1ll << n;
  Vec x(2 * dim_e);
  for (std::int64_t p = 0; p < photons; ++p) {
    const std::int64_t base0 = p << N;
    const std::int64_t base1 = (1ll << (n + N)) | base0;
    for (std::int64_t e = 0; e < dim_e; ++e) {
      x(e) = psi(base0 + e);
      x(dim_e + e) = psi(base1 + e);
    }
    const Vec y = u * x;
    for (std::int64_t e = 0; e < dim_e; ++e) {
      psi(base0 + e) = y(e);
      psi(base1 + e) = y(dim_e + e);
    }
  }
}

// CNOT with the dot as control and photon i as target.
void apply_cnot(Vec& psi, int i, int n, int N) {
  const std::int64_t dim_e = 1ll << N;
  const std::int64_t photons = 1ll << n;
  const std::int64_t bit = 1ll << (i - 1);
  const std::int64_t dot = 1ll << (n + N);
  for (std::int64_t p = 0; p < photons; ++p) {
    if (p & bit) continue;
    const std::int64_t a = dot | (p << N);
    const std::int64_t b = dot | ((p | bit) << N);
    for (std::int64_t e = 0; e < dim_e; ++e)
      std::swap(psi(a + e), psi(b + e));
  }
}

void apply_dot(Vec& psi, const Mat& op, int n, int N) {
  const std::int64_t half = 1ll << (n + N);
  for (std::int64_t idx = 0; idx < half; ++idx) {
    const cx a = psi(idx), b = psi(half + idx);
    psi(idx) = op(0, 0) * a + op(0, 1) * b;
    psi(half + idx) = op(1, 0) * a + op(1, 1) * b;
  }
}

// Projects the final state onto the graph-state basis Z_D^d Z^alpha |C_n>
// and accumulates probabilities and conditional polarization numerators.
struct OracleAccum {
  RVec probs, dot_probs, polar_num;
};

void accumulate_graph_basis(OracleAccum& acc, const Vec& psi, double weight,
                            const Vec& cluster, int n, int N) {
  const std::int64_t dim_e = 1ll << N;
  const std::int64_t basis = 1ll << (n + 1);
  for (Pattern alpha = 0; alpha < (1u << n); ++alpha) {
    for (int d_err = 0; d_err < 2; ++d_err) {
      double p = 0.0, pol = 0.0;
      for (std::int64_t e = 0; e < dim_e; ++e) {
        cx amp = 0.0;
        for (std::int64_t dp = 0; dp < basis; ++dp) {
          const std::int64_t photon_bits = dp & ((1ll << n) - 1);
          const int dot_bit = static_cast<int>(dp >> n);
          int sign = popcount(photon_bits & alpha) + dot_bit * d_err;
          const cx c = std::conj(cluster(dp)) * psi((dp << N) | e);
          amp += (sign & 1) ? -c : c;
        }
        const double w = std::norm(amp);
        p += w;
        pol += sector_of_index(e, N) * w;
      }
      if (d_err == 0) {
        acc.probs(alpha) += weight * p;
        acc.polar_num(alpha) += weight * pol;
      } else {
        acc.dot_probs(alpha) += weight * p;
      }
    }
  }
}

}  // namespace

Vec ideal_cluster_amplitudes(int n) {
  Vec psi = Vec::Zero(1ll << (n + 1));
  psi(0) = 1.0;
  const Mat u_y = evolve_unitary(dot_matrix(Axis::Y), std::numbers::pi / 4.0);
  for (int i = 1; i <= n; ++i) {
    apply_dot(psi, u_y, n, 0);
    apply_cnot(psi, i, n, 0);
  }
  return psi;
}

ErrorDistribution brute_force_oracle(const Mat& u, const EnvState& env, int n,
                                     int max_total_qubits) {
  if (n < 1) throw config_error("brute_force_oracle: n must be >= 1");
  const std::int64_t dim_e = u.rows() / 2;
  const int N = log2_exact(dim_e, "brute_force_oracle");
  if (env.N != N)
    throw config_error("brute_force_oracle: environment/U mismatch");
  if (n + 1 + N > max_total_qubits)
    throw resource_error("brute_force_oracle: " + std::to_string(n + 1 + N) +
                         " qubits exceeds limit " +
                         std::to_string(max_total_qubits));

  const Vec cluster = ideal_cluster_amplitudes(n);
  const auto [cols, weights] = env.columns();

  OracleAccum acc;
  acc.probs = RVec::Zero(1ll << n);
  acc.dot_probs = RVec::Zero(1ll << n);
  acc.polar_num = RVec::Zero(1ll << n);

  for (Eigen::Index j = 0; j < cols.cols(); ++j) {
    Vec psi = Vec::Zero(1ll << (n + 1 + N));
    psi.segment(0, dim_e) = cols.col(j);
    for (int i = 1; i <= n; ++i) {
      apply_joint(psi, u, n, N);
      apply_cnot(psi, i, n, N);
    }
    accumulate_graph_basis(acc, psi, weights(j), cluster, n, N);
  }

  ErrorDistribution dist;
  dist.n = n;
  dist.probs = acc.probs;
  dist.dot_probs = acc.dot_probs;
  dist.h.resize(1ll << n);
  dist.polarization = RVec::Constant(1ll << n,
                                     std::numeric_limits<double>::quiet_NaN());
  for (Pattern alpha = 0; alpha < (1u << n); ++alpha) {
    dist.h[alpha] = h_count(alpha, n).h;
    if (acc.probs(alpha) > kConditionalFloor)
      dist.polarization(alpha) = acc.polar_num(alpha) / acc.probs(alpha);
  }
  dist.clamp();
  return dist;
}

ErrorDistribution ideal_insertion_distribution(int n, int l, Axis pauli) {
  if (l < 1 || l > n)
    throw config_error("ideal_insertion_distribution: step out of range");
  Vec psi = Vec::Zero(1ll << (n + 1));
  psi(0) = 1.0;
  const Mat u_y = evolve_unitary(dot_matrix(Axis::Y), std::numbers::pi / 4.0);
  for (int i = 1; i <= n; ++i) {
    if (i == l) apply_dot(psi, dot_matrix(pauli), n, 0);
    apply_dot(psi, u_y, n, 0);
    apply_cnot(psi, i, n, 0);
  }

  OracleAccum acc;
  acc.probs = RVec::Zero(1ll << n);
  acc.dot_probs = RVec::Zero(1ll << n);
  acc.polar_num = RVec::Zero(1ll << n);
  accumulate_graph_basis(acc, psi, 1.0, ideal_cluster_amplitudes(n), n, 0);

  ErrorDistribution dist;
  dist.n = n;
  dist.probs = acc.probs;
  dist.dot_probs = acc.dot_probs;
  dist.h.resize(1ll << n);
  dist.polarization = RVec::Constant(1ll << n,
                                     std::numeric_limits<double>::quiet_NaN());
  for (Pattern alpha = 0; alpha < (1u << n); ++alpha)
    dist.h[alpha] = h_count(alpha, n).h;
  dist.clamp();
  return dist;
}

}  // namespace cserr
