#pragma once

#include <random>

#include "cserr/common.hpp"

namespace cserr::testing {

inline Mat random_complex(int rows, int cols, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = cx(dist(gen), dist(gen));
  return m;
}

inline Mat random_hermitian(int dim, unsigned seed) {
  const Mat m = random_complex(dim, dim, seed);
  return 0.5 * (m + m.adjoint());
}

inline Mat random_unitary(int dim, unsigned seed) {
  const Mat m = random_complex(dim, dim, seed);
  Eigen::HouseholderQR<Mat> qr(m);
  Mat q = qr.householderQ();
  return q;
}

inline Vec random_state(int dim, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = cx(dist(gen), dist(gen));
  v /= v.norm();
  return v;
}

// Independent largest-eigenvalue oracle for PSD matrices.
inline double power_iteration_norm(const Mat& a, int iters = 5000) {
  Vec v = Vec::Ones(a.rows());
  v /= v.norm();
  double lambda = 0.0;
  for (int i = 0; i < iters; ++i) {
    Vec w = a * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    lambda = norm;
  }
  return lambda;
}

// Test-only matrix exponential by scaling and squaring of the Taylor
// series; independent of the eigendecomposition route.
inline Mat expm_taylor(const Mat& a, int squarings = 12, int terms = 24) {
  const double scale = std::pow(2.0, squarings);
  const Mat x = a / scale;
  Mat term = Mat::Identity(a.rows(), a.cols());
  Mat sum = term;
  for (int k = 1; k <= terms; ++k) {
    term = (term * x) / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

}  // namespace cserr::testing
