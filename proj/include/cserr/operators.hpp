#pragma once

#include <vector>

#include "cserr/common.hpp"

namespace cserr {

// Dense operator algebra for N spin-1/2 environment sites plus one emitter
// qubit. Environment basis convention: the I^y-diagonal basis, bit (k-1) of
// a basis index holds site k with bit value 0 -> I^y = +1, 1 -> I^y = -1.
// The emitter (dot) uses the standard z basis. Joint indices are laid out
// dot-major: index = d * 2^N + e.

enum class Axis { X, Y, Z, Plus, Minus };

// 2x2 site operators in the y-diagonal basis. They satisfy the cyclic
// algebra [I^x, I^y] = 2i I^z and I^pm = (1/2)(I^x +- i I^z); with that
// convention I^+ lowers the y projection by 2 and I^- raises it.
Mat site_matrix(Axis axis);

// 2x2 emitter operators in the z basis (standard Paulis).
Mat dot_matrix(Axis axis);

// Embeds the single-site operator on site k (1-based) into the 2^N
// environment space.
Mat site_operator(Axis axis, int k, int N);

// Adds coeff * (op embedded on the qubit occupying bit position `bit`) into
// the dense matrix `h` whose dimension is 2^(number of bits). Used to
// assemble Hamiltonians without dense Kronecker products.
void add_embedded(Mat& h, const Mat& op2, int bit, cx coeff);

// Same for a two-qubit product op_a (bit_a) * op_b (bit_b), bit_a != bit_b.
void add_embedded_pair(Mat& h, const Mat& op_a, int bit_a, const Mat& op_b,
                       int bit_b, cx coeff);

struct EigResult {
  RVec values;   // ascending
  Mat vectors;   // columns are the eigenvectors
};

// Hermitian eigendecomposition; rejects inputs whose hermiticity defect
// exceeds herm_tol and reports the measured asymmetry.
EigResult hermitian_eig(const Mat& h, double herm_tol = kHermTol);

// exp(-i theta H) via eigendecomposition of the Hermitian H.
Mat evolve_unitary(const Mat& h, double theta, double herm_tol = kHermTol);

// Largest eigenvalue of a Hermitian positive semi-definite matrix, the
// operator norm of A for PSD A (intended use: A = M^dagger M).
double psd_norm(const Mat& a);

// Projector onto the eigenspace of sum_k I_k^y with eigenvalue m.
struct SectorProjector {
  int m = 0;
  int N = 0;
  std::vector<int> basis_indices;

  int rank() const { return static_cast<int>(basis_indices.size()); }
  Mat as_matrix() const;
};

// y projection of an environment basis index: N - 2 * popcount.
inline int sector_of_index(std::uint64_t index, int N) {
  return N - 2 * popcount(index);
}

// One projector per m in {-N, -N+2, ..., N}, ordered by ascending m.
std::vector<SectorProjector> sector_projectors(int N);

const SectorProjector& sector_with_m(const std::vector<SectorProjector>& ps,
                                     int m);

// The rows/columns of `a` restricted to the projector's basis indices.
Mat sector_block(const Mat& a, const SectorProjector& p);

}  // namespace cserr
