#pragma once

#include <utility>
#include <vector>

#include "cserr/bath.hpp"
#include "cserr/common.hpp"
#include "cserr/engine.hpp"
#include "cserr/pattern.hpp"

namespace cserr {

// Markovian-form bounds for pure-dephasing dynamics: the global norm bound
// p_-^h p_+^(n-h) and its tighter sector-projected version.

// M_+ = (1/2)(U_- + U_+), M_- = (i/2)(U_- - U_+); inputs must be unitary.
std::pair<Mat, Mat> m_operators(const Mat& u_plus, const Mat& u_minus);

// O(alpha) as the ordered product of n M_+/M_- factors (M_- where f_i is
// odd), factor i = 1 rightmost. Equals the engine's error operator built
// from the pure-dephasing step unitary.
Mat pd_error_operator(Pattern alpha, int n, const Mat& m_plus,
                      const Mat& m_minus);

// p_-^h(alpha) * p_+^(n - h(alpha)).
double bound_eq5(Pattern alpha, int n, double p_plus, double p_minus);

// ||M^(m)+ M^(m)|| for every sector block, ordered by ascending m.
std::vector<double> sector_norms(const Mat& m_op,
                                 const std::vector<SectorProjector>& sectors);

struct BoundReport {
  int n = 0;
  double p_plus = 0.0;   // ||M_+^dag M_+||
  double p_minus = 0.0;  // ||M_-^dag M_-||
  std::vector<double> p_plus_sector;   // per sector, ascending m
  std::vector<double> p_minus_sector;
  RVec sector_weights;   // environment weight per sector, ascending m
  bool multi_sector = false;      // weighted-average extension in use
  bool cross_sector_coherence = false;
  RVec eq5;  // per pattern
  RVec eq6;  // per pattern
};

// Bounds for every pattern given the dephasing pair and the initial
// environment state. For an environment confined to one sector eq6 is that
// sector's bound; otherwise it is the sector-weighted average (an extension
// beyond single-sector initial states, flagged as multi_sector).
BoundReport compute_bounds(int n, const HamiltonianSet& set,
                           const EnvState& env);

struct BandStats {
  int h = 0;
  int count = 0;
  double min_p = 0.0;
  double max_p = 0.0;
  double mean_p = 0.0;
  double mean_log10_p = 0.0;  // over members with P > floor
  int log_count = 0;
};

// Patterns grouped by h(alpha); the band-plot ordering key is
// (h, pattern integer).
std::vector<BandStats> band_summary(const ErrorDistribution& dist,
                                    double log_floor = 1e-300);

// Pattern order sorted by (h, pattern integer).
std::vector<Pattern> band_order(int n);

}  // namespace cserr
