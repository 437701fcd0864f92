#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cserr/bounds.hpp"
#include "test_util.hpp"

using namespace cserr;
using namespace cserr::testing;

namespace {

double max_diff(const Mat& a, const Mat& b) { return max_abs(Mat(a - b)); }

struct Setup {
  BathSpec spec;
  EnvState env;
  HamiltonianSet set;
};

Setup make_setup(int N, double a_over_omega, int m,
                 double dipolar_ratio = 2500.0) {
  Setup s{gaussian_profiles(N, a_over_omega, dipolar_ratio, 1e-3),
          EnvState::sector_uniform(N, m),
          {}};
  s.set = build_dephasing_pair(s.spec, s.env);
  return s;
}

// Minimum number of fundamental Y insertions whose XOR composition
// reproduces alpha (Y at step i toggles photons {i, i-1}, indices >= 1).
int min_y_insertions(Pattern alpha, int n) {
  int best = n + 1;
  for (Pattern subset = 0; subset < (1u << n); ++subset) {
    Pattern produced = 0;
    for (int i = 1; i <= n; ++i) {
      if (!((subset >> (i - 1)) & 1u)) continue;
      produced ^= 1u << (i - 1);
      if (i >= 2) produced ^= 1u << (i - 2);
    }
    if (produced == alpha) best = std::min(best, popcount(subset));
  }
  return best;
}

// Aligns b to a by the phase at a's largest-magnitude entry.
double phase_aligned_diff(const Mat& a, const Mat& b) {
  Eigen::Index r = 0, c = 0;
  a.cwiseAbs().maxCoeff(&r, &c);
  if (std::abs(a(r, c)) == 0.0) return max_diff(a, b);
  const cx phase = b(r, c) / a(r, c);
  return max_diff(Mat(a * phase), b);
}

}  // namespace

TEST_CASE("h_count anchors") {
  CHECK(h_count(string_to_pattern("010"), 3).h == 2);
  CHECK(h_count(0, 5).h == 0);
  CHECK(h_count(string_to_pattern("011"), 3).h == 1);
  // single error on photon l needs l adjacent pairs
  for (int n = 1; n <= 5; ++n)
    for (int l = 1; l <= n; ++l)
      CHECK(h_count(1u << (l - 1), n).h == l);

  const auto hc = h_count(string_to_pattern("010"), 3);
  CHECK(hc.f == std::vector<int>{1, 1, 0});
}

TEST_CASE("h equals the brute-force minimal Y-insertion count") {
  for (int n = 1; n <= 4; ++n)
    for (Pattern alpha = 0; alpha < (1u << n); ++alpha)
      CHECK(h_count(alpha, n).h == min_y_insertions(alpha, n));
}

TEST_CASE("m_operators limits and reconstruction") {
  const Mat u = random_unitary(8, 5);
  const auto [m_plus, m_minus] = m_operators(u, u);
  CHECK(max_abs(m_minus) < 1e-15);
  CHECK(max_diff(m_plus, u) < 1e-15);

  const Mat u2 = random_unitary(8, 6);
  const auto [p, q] = m_operators(u2, u);
  CHECK(max_diff(p + cx(0, -1) * q, u) < 1e-14);   // U_- = M_+ - i M_-
  CHECK(max_diff(p + cx(0, 1) * q, u2) < 1e-14);   // U_+ = M_+ + i M_-
  CHECK_THROWS_AS(m_operators(2.0 * u, u), invariant_error);
}

TEST_CASE("pd_error_operator composition") {
  const Mat m_plus = random_complex(4, 4, 11);
  const Mat m_minus = random_complex(4, 4, 12);

  CHECK(max_diff(pd_error_operator(0, 3, m_plus, m_minus),
                 m_plus * m_plus * m_plus) < 1e-13);
  // alpha = (010): f = (1, 1, 0) so the product is M_+ M_- M_-
  CHECK(max_diff(pd_error_operator(string_to_pattern("010"), 3, m_plus,
                                   m_minus),
                 m_plus * m_minus * m_minus) < 1e-13);
}

TEST_CASE("M-product factorisation equals the engine operator") {
  const Setup s = make_setup(3, 2.0, 1);
  const Mat u = step_unitary(s.set.pd_joint(), s.set.omega_eff);
  const Mat delta = delta_op(u);
  const auto [u_plus, u_minus] = u_pm_pair(s.set);
  const auto [m_plus, m_minus] = m_operators(u_plus, u_minus);

  const int n = 3;
  for (Pattern alpha = 0; alpha < (1u << n); ++alpha) {
    const Mat engine_op = error_operator(alpha, n, delta).first;
    const Mat pd_op = pd_error_operator(alpha, n, m_plus, m_minus);
    CHECK(phase_aligned_diff(engine_op, pd_op) < 1e-10);
  }
}

TEST_CASE("M-product probabilities agree with the brute-force oracle") {
  const Setup s = make_setup(3, 2.0, 1);
  const auto [u_plus, u_minus] = u_pm_pair(s.set);
  const auto [m_plus, m_minus] = m_operators(u_plus, u_minus);
  const auto oracle = brute_force_oracle(pd_step_unitary(s.set), s.env, 3);
  const auto [cols, weights] = s.env.columns();
  for (Pattern alpha = 0; alpha < 8; ++alpha) {
    const Mat o = pd_error_operator(alpha, 3, m_plus, m_minus);
    double p = 0.0;
    for (Eigen::Index j = 0; j < cols.cols(); ++j)
      p += weights(j) * (o * cols.col(j)).squaredNorm();
    CHECK(p == doctest::Approx(oracle.probs(alpha)).epsilon(1e-10));
  }
}

TEST_CASE("U_pm are block-diagonal across sectors") {
  const Setup s = make_setup(4, 2.0, 0);
  const auto [u_plus, u_minus] = u_pm_pair(s.set);
  const auto sectors = sector_projectors(4);
  for (const Mat* u : {&u_plus, &u_minus}) {
    CHECK(unitarity_defect(*u) < 1e-10);
    for (std::int64_t i = 0; i < u->rows(); ++i)
      for (std::int64_t j = 0; j < u->cols(); ++j)
        if (sector_of_index(i, 4) != sector_of_index(j, 4))
          CHECK(std::abs((*u)(i, j)) < 1e-12);
  }
}

TEST_CASE("bound_eq5 frozen cases") {
  CHECK(bound_eq5(0, 4, 1.0, 0.3) == doctest::Approx(1.0));
  CHECK(bound_eq5(0, 4, 0.9, 0.3) == doctest::Approx(std::pow(0.9, 4)));
  // p_minus = 0 kills every pattern with h >= 1
  CHECK(bound_eq5(1, 3, 1.0, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("zero coupling gives p_minus = 0") {
  BathSpec spec;
  spec.N = 2;
  spec.omega = 1.0;
  spec.a_total = 0.0;
  spec.a_k = RVec::Zero(2);
  spec.omega_prime_k = RVec::Constant(2, 0.01);
  spec.b = Eigen::MatrixXd::Zero(2, 2);
  const EnvState env = EnvState::sector_uniform(2, 0);
  const auto set = build_dephasing_pair(spec, env);
  const auto report = compute_bounds(3, set, env);
  CHECK(report.p_minus == doctest::Approx(0.0));
  CHECK(report.p_plus == doctest::Approx(1.0));
  for (Pattern alpha = 1; alpha < 8; ++alpha) {
    CHECK(report.eq5(alpha) == doctest::Approx(0.0));
    CHECK(report.eq6(alpha) == doctest::Approx(0.0));
  }
}

TEST_CASE("bound dominance on pure-dephasing configurations") {
  for (double a_over_omega : {0.5, 1.0, 2.0}) {
    for (int N : {4, 6}) {
      const Setup s = make_setup(N, a_over_omega, 0);
      const int n = 5;
      const auto dist = distribution(pd_step_unitary(s.set), s.env, n);
      const auto report = compute_bounds(n, s.set, s.env);
      CHECK(report.p_plus <= 1.0 + 1e-12);
      CHECK(report.p_minus <= 1.0 + 1e-12);
      for (Pattern alpha = 0; alpha < (1u << n); ++alpha) {
        CAPTURE(a_over_omega);
        CAPTURE(N);
        CAPTURE(alpha);
        CHECK(dist.probs(alpha) <= report.eq6(alpha) + 1e-12);
        CHECK(report.eq6(alpha) <= report.eq5(alpha) + 1e-12);
      }
    }
  }
}

TEST_CASE("rank-1 sector bound is exact scalar algebra") {
  const Setup s = make_setup(2, 1.0, 2);
  const auto [u_plus, u_minus] = u_pm_pair(s.set);
  const auto [m_plus, m_minus] = m_operators(u_plus, u_minus);
  const auto report = compute_bounds(2, s.set, s.env);

  // m = +2 is index 0 of the environment basis
  const double p_plus = std::norm(m_plus(0, 0));
  const double p_minus = std::norm(m_minus(0, 0));
  for (Pattern alpha = 0; alpha < 4; ++alpha) {
    const int h = h_count(alpha, 2).h;
    CHECK(report.eq6(alpha) ==
          doctest::Approx(std::pow(p_minus, h) * std::pow(p_plus, 2 - h))
              .epsilon(1e-12));
  }

  // for a rank-1 sector the bound equals the exact probability
  const auto dist = distribution(pd_step_unitary(s.set), s.env, 2);
  for (Pattern alpha = 0; alpha < 4; ++alpha)
    CHECK(dist.probs(alpha) ==
          doctest::Approx(report.eq6(alpha)).epsilon(1e-10));
}

TEST_CASE("multi-sector environments use the weighted extension") {
  const Setup s = make_setup(2, 1.0, 0);
  Vec v(4);
  v << 0.6, 0.0, 0.0, 0.8;  // spans m = +2 and m = -2
  const EnvState env = EnvState::pure(2, v);
  const auto report = compute_bounds(2, s.set, env);
  CHECK(report.multi_sector);
  CHECK(report.cross_sector_coherence);
  CHECK(report.sector_weights(2) == doctest::Approx(0.36));
  CHECK(report.sector_weights(0) == doctest::Approx(0.64));
}

TEST_CASE("band summary structure") {
  ErrorDistribution dist;
  dist.n = 5;
  dist.probs = RVec::Zero(32);
  dist.dot_probs = RVec::Zero(32);
  dist.polarization = RVec::Zero(32);
  dist.h.resize(32);
  int with_h0 = 0;
  for (Pattern alpha = 0; alpha < 32; ++alpha) {
    dist.h[alpha] = h_count(alpha, 5).h;
    if (dist.h[alpha] == 0) ++with_h0;
    dist.probs(alpha) = std::pow(0.1, dist.h[alpha]);
  }
  CHECK(with_h0 == 1);

  const auto bands = band_summary(dist);
  int total = 0;
  for (const auto& b : bands) total += b.count;
  CHECK(total == 32);
  CHECK(bands[0].count == 1);
  for (std::size_t h = 1; h < bands.size(); ++h)
    if (bands[h].count > 0 && bands[h - 1].count > 0)
      CHECK(bands[h].mean_log10_p < bands[h - 1].mean_log10_p);

  const auto order = band_order(5);
  CHECK(order.front() == 0);
  for (std::size_t i = 1; i < order.size(); ++i)
    CHECK(h_count(order[i - 1], 5).h <= h_count(order[i], 5).h);
}

TEST_CASE("trivial generation puts all weight in the h = 0 band") {
  const Mat u_y = evolve_unitary(dot_matrix(Axis::Y), std::numbers::pi / 4.0);
  const auto dist = distribution(u_y, EnvState::trivial(), 5);
  const auto bands = band_summary(dist);
  CHECK(bands[0].max_p == doctest::Approx(1.0));
  for (std::size_t h = 1; h < bands.size(); ++h)
    CHECK(bands[h].max_p == doctest::Approx(0.0));
}
