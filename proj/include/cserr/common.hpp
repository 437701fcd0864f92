#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace cserr {

using cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// Default tolerances: hermiticity of constructed operators, unitarity of
// evolution operators, probability normalisation.
inline constexpr double kHermTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kProbTol = 1e-10;
inline constexpr double kProbClamp = 1e-12;

// Invalid configuration or argument (CLI exit code 2).
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A mathematical invariant failed at runtime (CLI exit code 3).
class invariant_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested problem size exceeds configured limits (CLI exit code 4).
class resource_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline int popcount(std::uint64_t x) { return std::popcount(x); }

inline bool is_power_of_two(std::int64_t x) {
  return x > 0 && (x & (x - 1)) == 0;
}

inline double max_abs(const Mat& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

// max |A - A^dagger|
inline double hermiticity_defect(const Mat& a) {
  return max_abs(Mat(a - a.adjoint()));
}

inline void require_hermitian(const Mat& a, double tol, const char* what) {
  if (a.rows() != a.cols())
    throw invariant_error(std::string(what) + ": matrix is not square");
  const double defect = hermiticity_defect(a);
  if (defect > tol)
    throw invariant_error(std::string(what) + ": not Hermitian, max|A-A^+| = " +
                          std::to_string(defect));
}

// max |U^dagger U - 1|
inline double unitarity_defect(const Mat& u) {
  Mat g = u.adjoint() * u;
  g.diagonal().array() -= 1.0;
  return max_abs(g);
}

Mat kron(const Mat& a, const Mat& b);

// FNV-1a, used to fingerprint run configurations.
std::string fnv1a_hex(std::string_view s);

}  // namespace cserr
