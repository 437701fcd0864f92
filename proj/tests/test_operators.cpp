#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cserr/operators.hpp"
#include "test_util.hpp"

using namespace cserr;
using namespace cserr::testing;

namespace {
double max_diff(const Mat& a, const Mat& b) { return max_abs(Mat(a - b)); }
}  // namespace

TEST_CASE("site_operator y is diagonal with the +1/-1 convention") {
  const Mat iy = site_operator(Axis::Y, 1, 1);
  CHECK(iy(0, 0) == cx(1, 0));
  CHECK(iy(1, 1) == cx(-1, 0));
  CHECK(iy(0, 1) == cx(0, 0));
}

TEST_CASE("ladder action of the literal I^pm = (1/2)(I^x pm i I^z)") {
  // With the cyclic algebra [I^x, I^y] = 2i I^z the combination
  // (1/2)(I^x + i I^z) necessarily lowers the y projection, so I^+ maps
  // the I^y = +1 basis state to the I^y = -1 one.
  const Mat ip = site_operator(Axis::Plus, 1, 1);
  Vec up = Vec::Zero(2), down = Vec::Zero(2);
  up(0) = 1.0;
  down(1) = 1.0;
  CHECK((ip * up - down).norm() == doctest::Approx(0.0));
  CHECK((ip * down).norm() == doctest::Approx(0.0));
  const Mat im = site_operator(Axis::Minus, 1, 1);
  CHECK((im * down - up).norm() == doctest::Approx(0.0));
}

TEST_CASE("Pauli algebra [I^x, I^y] = 2i I^z on an embedded site") {
  const int N = 3;
  for (int k = 1; k <= N; ++k) {
    const Mat ix = site_operator(Axis::X, k, N);
    const Mat iy = site_operator(Axis::Y, k, N);
    const Mat iz = site_operator(Axis::Z, k, N);
    CHECK(max_diff(ix * iy - iy * ix, cx(0, 2) * iz) < 1e-14);
    CHECK(max_diff(iy * iz - iz * iy, cx(0, 2) * ix) < 1e-14);
    CHECK(max_diff(iz * ix - ix * iz, cx(0, 2) * iy) < 1e-14);
  }
}

TEST_CASE("site operators square to identity") {
  for (int N = 1; N <= 4; ++N)
    for (int k = 1; k <= N; ++k)
      for (Axis axis : {Axis::X, Axis::Y, Axis::Z}) {
        const Mat op = site_operator(axis, k, N);
        CHECK(max_diff(op * op, Mat::Identity(op.rows(), op.cols())) < 1e-14);
      }
}

TEST_CASE("operators on different sites commute") {
  const int N = 4;
  const Axis axes[] = {Axis::X, Axis::Y, Axis::Z};
  for (int k = 1; k <= N; ++k)
    for (int j = 1; j <= N; ++j) {
      if (j == k) continue;
      for (Axis a : axes)
        for (Axis b : axes) {
          const Mat oa = site_operator(a, k, N);
          const Mat ob = site_operator(b, j, N);
          CHECK(max_abs(Mat(oa * ob - ob * oa)) < 1e-14);
        }
    }
}

TEST_CASE("site_operator rejects bad indices") {
  CHECK_THROWS_AS(site_operator(Axis::X, 0, 2), config_error);
  CHECK_THROWS_AS(site_operator(Axis::X, 3, 2), config_error);
  CHECK_THROWS_AS(site_operator(Axis::X, 1, 0), config_error);
}

TEST_CASE("hermitian_eig on small frozen cases") {
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  const auto r = hermitian_eig(d);
  CHECK(r.values(0) == doctest::Approx(1.0));
  CHECK(r.values(1) == doctest::Approx(3.0));

  Mat x = Mat::Zero(2, 2);
  x(0, 1) = 1.0;
  x(1, 0) = 1.0;
  const auto rx = hermitian_eig(x);
  CHECK(rx.values(0) == doctest::Approx(-1.0));
  CHECK(rx.values(1) == doctest::Approx(1.0));
}

TEST_CASE("hermitian_eig reconstruction and orthonormality") {
  const Mat h = random_hermitian(24, 7);
  const auto r = hermitian_eig(h);
  const Mat recon =
      r.vectors * r.values.cast<cx>().asDiagonal() * r.vectors.adjoint();
  const double scale = r.values.cwiseAbs().maxCoeff();
  CHECK(max_abs(Mat(recon - h)) < 1e-10 * scale);
  CHECK(unitarity_defect(r.vectors) < 1e-12);
}

TEST_CASE("hermitian_eig rejects non-Hermitian input with the asymmetry") {
  Mat bad = Mat::Zero(2, 2);
  bad(0, 1) = 1.0;
  try {
    hermitian_eig(bad);
    FAIL("expected invariant_error");
  } catch (const invariant_error& e) {
    CHECK(std::string(e.what()).find("1.") != std::string::npos);
  }
}

TEST_CASE("evolve_unitary frozen cases") {
  CHECK(max_diff(evolve_unitary(Mat::Zero(4, 4), 0.7), Mat::Identity(4, 4)) <
        1e-14);

  // e^{-i Y pi/4} = (1/sqrt2) [[1, -1], [1, 1]]
  const Mat u = evolve_unitary(dot_matrix(Axis::Y), std::numbers::pi / 4.0);
  Mat expected(2, 2);
  expected << 1, -1, 1, 1;
  expected /= std::numbers::sqrt2;
  CHECK(max_diff(u, expected) < 1e-12);
}

TEST_CASE("evolve_unitary inverse check") {
  const Mat h = random_hermitian(16, 21);
  const Mat u = evolve_unitary(h, 0.37);
  const Mat v = evolve_unitary(h, -0.37);
  CHECK(max_diff(u * v, Mat::Identity(16, 16)) < 1e-10);
  CHECK(unitarity_defect(u) < 1e-10);
}

TEST_CASE("psd_norm basics and the power-iteration oracle") {
  CHECK(psd_norm(Mat::Identity(8, 8)) == doctest::Approx(1.0));
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 0.3;
  d(1, 1) = 0.7;
  CHECK(psd_norm(d) == doctest::Approx(0.7));

  const Mat m = random_complex(20, 20, 3);
  const Mat a = m.adjoint() * m;
  CHECK(psd_norm(a) == doctest::Approx(power_iteration_norm(a)).epsilon(1e-8));
}

TEST_CASE("psd_norm rejects indefinite input") {
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -0.5;
  CHECK_THROWS_AS(psd_norm(d), invariant_error);
}

TEST_CASE("psd_norm is sub-multiplicative on products") {
  for (unsigned seed : {11u, 12u, 13u}) {
    const Mat a = random_complex(12, 12, seed);
    const Mat b = random_complex(12, 12, seed + 100);
    const Mat ab = a * b;
    const double lhs = psd_norm(ab.adjoint() * ab);
    const double rhs = psd_norm(a.adjoint() * a) * psd_norm(b.adjoint() * b);
    CHECK(lhs <= rhs * (1.0 + 1e-12));
  }
}

TEST_CASE("sector projectors for N = 2") {
  const auto sectors = sector_projectors(2);
  REQUIRE(sectors.size() == 3);
  CHECK(sectors[0].m == -2);
  CHECK(sectors[1].m == 0);
  CHECK(sectors[2].m == 2);
  CHECK(sectors[0].rank() == 1);
  CHECK(sectors[1].rank() == 2);
  CHECK(sectors[2].rank() == 1);

  Mat sum = Mat::Zero(4, 4);
  for (const auto& s : sectors) sum += s.as_matrix();
  CHECK(max_diff(sum, Mat::Identity(4, 4)) == 0.0);

  // P_0 (sum_k I_k^y) P_0 = 0
  Mat iy_total = site_operator(Axis::Y, 1, 2) + site_operator(Axis::Y, 2, 2);
  const Mat p0 = sectors[1].as_matrix();
  CHECK(max_abs(Mat(p0 * iy_total * p0)) == 0.0);
}

TEST_CASE("sector projector family properties up to N = 8") {
  for (int N = 1; N <= 8; ++N) {
    const auto sectors = sector_projectors(N);
    std::int64_t total_rank = 0;
    auto binom = [](int n, int k) {
      double v = 1.0;
      for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
      return static_cast<std::int64_t>(v + 0.5);
    };
    for (std::size_t a = 0; a < sectors.size(); ++a) {
      total_rank += sectors[a].rank();
      CHECK(sectors[a].rank() == binom(N, (N + sectors[a].m) / 2));
      const Mat pa = sectors[a].as_matrix();
      CHECK(max_diff(pa * pa, pa) == 0.0);
      for (std::size_t b = a + 1; b < sectors.size(); ++b)
        CHECK(max_abs(Mat(pa * sectors[b].as_matrix())) == 0.0);
    }
    CHECK(total_rank == (1ll << N));
  }
}
