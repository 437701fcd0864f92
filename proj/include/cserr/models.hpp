#pragma once

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cserr/common.hpp"
#include "cserr/engine.hpp"
#include "cserr/pattern.hpp"

namespace cserr {

// Markovian reference models: the single-parameter p^h (1-p)^(n-h) form,
// the fundamental X/Y/Z trajectory model, and the environment-size scaling
// fits.

struct FitReport {
  std::map<std::string, double> params;
  double objective = 0.0;
  RVec residuals;  // log residuals per pattern, or per point for scaling
  // patterns where the model lies below the exact value, with the gap
  std::vector<std::pair<Pattern, double>> bound_violations;
  bool attainable = true;  // bounding mode only
  std::string note;
};

// p^h(alpha) (1-p)^(n - h(alpha)).
double markov_prob(double p, Pattern alpha, int n);

// Model probabilities for every pattern.
RVec markov_model_probs(double p, int n);

enum class MarkovFitMode { LeastSquaresLog, Bounding };

// LeastSquaresLog: golden-section search of p on [1e-6, 0.5] minimising the
// summed squared log residual (patterns below 1e-14 excluded). Bounding:
// smallest p whose model dominates every exact value, found by bisection.
FitReport fit_markov(const ErrorDistribution& dist,
                     MarkovFitMode mode = MarkovFitMode::LeastSquaresLog);

enum class Step { I, X, Y, Z };

// Photonic Z pattern produced by one emitter error trajectory: a step-i
// error maps to X -> {i}, Y -> {i, i-1}, Z -> {i-1} (indices below 1 act
// trivially), composed by XOR.
Pattern trajectory_pattern(const std::vector<Step>& steps);

struct TrajectoryModel {
  double p_x = 0.0;
  double p_y = 0.0;
  double p_z = 0.0;
  int n = 0;

  void validate() const;
};

// Exact enumeration of all 4^n trajectories, aggregated per pattern.
RVec trajectory_distribution(const TrajectoryModel& model, int max_steps = 10);

// Coarse grid (step 0.01) over the probability simplex followed by
// Nelder-Mead refinement of the squared log residual.
FitReport fit_trajectory(const ErrorDistribution& dist, int max_steps = 10);

enum class ScalingForm {
  Exact,  // s * [1 - (1 + |a| N^-2)^(-1/2)]; the stated form is a
          // proportionality, so a scale prefactor is part of the fit
  Bound,  // c - (1 - |a| N^-2)^(-1/2)
};

// `second` is the prefactor s for Exact and the offset c for Bound.
double scaling_model(ScalingForm form, double a, double second,
                     double n_sites);

// Least-squares fit of the closed scaling forms over (N, value) points;
// params hold "a" and "s" or "c", plus the relative RMS residual as
// "rel_rms".
FitReport scaling_fit(const std::vector<std::pair<double, double>>& points,
                      ScalingForm form);

}  // namespace cserr
