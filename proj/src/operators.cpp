#include "cserr/operators.hpp"

#include <Eigen/Eigenvalues>

namespace cserr {

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

std::string fnv1a_hex(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

Mat site_matrix(Axis axis) {
  Mat m = Mat::Zero(2, 2);
  switch (axis) {
    case Axis::X:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case Axis::Y:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
    case Axis::Z:
      m(0, 1) = cx(0, 1);
      m(1, 0) = cx(0, -1);
      break;
    case Axis::Plus:   // (1/2)(I^x + i I^z)
      m(1, 0) = 1.0;
      break;
    case Axis::Minus:  // (1/2)(I^x - i I^z)
      m(0, 1) = 1.0;
      break;
  }
  return m;
}

Mat dot_matrix(Axis axis) {
  Mat m = Mat::Zero(2, 2);
  switch (axis) {
    case Axis::X:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case Axis::Y:
      m(0, 1) = cx(0, -1);
      m(1, 0) = cx(0, 1);
      break;
    case Axis::Z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
    case Axis::Plus:   // (1/2)(X + i Z) to mirror the site convention
      m(1, 0) = 1.0;
      break;
    case Axis::Minus:
      m(0, 1) = 1.0;
      break;
  }
  return m;
}

void add_embedded(Mat& h, const Mat& op2, int bit, cx coeff) {
  const Eigen::Index dim = h.rows();
  const std::uint64_t mask = 1ull << bit;
  for (std::uint64_t col = 0; col < static_cast<std::uint64_t>(dim); ++col) {
    const int b = (col & mask) ? 1 : 0;
    for (int r = 0; r < 2; ++r) {
      const cx v = op2(r, b);
      if (v == cx(0, 0)) continue;
      const std::uint64_t row = r ? (col | mask) : (col & ~mask);
      h(row, col) += coeff * v;
    }
  }
}

void add_embedded_pair(Mat& h, const Mat& op_a, int bit_a, const Mat& op_b,
                       int bit_b, cx coeff) {
  const Eigen::Index dim = h.rows();
  const std::uint64_t mask_a = 1ull << bit_a;
  const std::uint64_t mask_b = 1ull << bit_b;
  for (std::uint64_t col = 0; col < static_cast<std::uint64_t>(dim); ++col) {
    const int ba = (col & mask_a) ? 1 : 0;
    const int bb = (col & mask_b) ? 1 : 0;
    for (int ra = 0; ra < 2; ++ra) {
      const cx va = op_a(ra, ba);
      if (va == cx(0, 0)) continue;
      for (int rb = 0; rb < 2; ++rb) {
        const cx vb = op_b(rb, bb);
        if (vb == cx(0, 0)) continue;
        std::uint64_t row = col;
        row = ra ? (row | mask_a) : (row & ~mask_a);
        row = rb ? (row | mask_b) : (row & ~mask_b);
        h(row, col) += coeff * va * vb;
      }
    }
  }
}

Mat site_operator(Axis axis, int k, int N) {
  if (N < 1) throw config_error("site_operator: N must be >= 1");
  if (k < 1 || k > N)
    throw config_error("site_operator: site index k = " + std::to_string(k) +
                       " out of range 1.." + std::to_string(N));
  Mat h = Mat::Zero(1ll << N, 1ll << N);
  add_embedded(h, site_matrix(axis), k - 1, 1.0);
  return h;
}

EigResult hermitian_eig(const Mat& h, double herm_tol) {
  require_hermitian(h, herm_tol, "hermitian_eig");
  Eigen::SelfAdjointEigenSolver<Mat> solver(h);
  if (solver.info() != Eigen::Success)
    throw invariant_error("hermitian_eig: eigensolver failed to converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Mat evolve_unitary(const Mat& h, double theta, double herm_tol) {
  const auto eig = hermitian_eig(h, herm_tol);
  Vec phases(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    phases(i) = std::exp(cx(0, -theta * eig.values(i)));
  Mat u = eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
  const double defect = unitarity_defect(u);
  if (defect > kUnitaryTol)
    throw invariant_error("evolve_unitary: result not unitary, defect = " +
                          std::to_string(defect));
  return u;
}

double psd_norm(const Mat& a) {
  require_hermitian(a, kHermTol, "psd_norm");
  Eigen::SelfAdjointEigenSolver<Mat> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw invariant_error("psd_norm: eigensolver failed to converge");
  const double lo = solver.eigenvalues()(0);
  if (lo < -1e-10)
    throw invariant_error("psd_norm: input not PSD, min eigenvalue = " +
                          std::to_string(lo));
  return std::max(0.0, solver.eigenvalues()(solver.eigenvalues().size() - 1));
}

Mat SectorProjector::as_matrix() const {
  Mat p = Mat::Zero(1ll << N, 1ll << N);
  for (int idx : basis_indices) p(idx, idx) = 1.0;
  return p;
}

std::vector<SectorProjector> sector_projectors(int N) {
  if (N < 1) throw config_error("sector_projectors: N must be >= 1");
  std::vector<SectorProjector> out(N + 1);
  // ascending m: slot s holds m = -N + 2s (popcount N - s)
  for (int s = 0; s <= N; ++s) {
    out[s].m = -N + 2 * s;
    out[s].N = N;
  }
  const std::int64_t dim = 1ll << N;
  for (std::int64_t idx = 0; idx < dim; ++idx) {
    const int m = sector_of_index(idx, N);
    out[(m + N) / 2].basis_indices.push_back(static_cast<int>(idx));
  }
  return out;
}

const SectorProjector& sector_with_m(const std::vector<SectorProjector>& ps,
                                     int m) {
  for (const auto& p : ps)
    if (p.m == m) return p;
  throw config_error("sector m = " + std::to_string(m) +
                     " does not exist for this environment size");
}

Mat sector_block(const Mat& a, const SectorProjector& p) {
  const auto& idx = p.basis_indices;
  Mat out(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j)
      out(i, j) = a(idx[i], idx[j]);
  return out;
}

}  // namespace cserr
