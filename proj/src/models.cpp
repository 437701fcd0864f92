#include "cserr/models.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace cserr {

namespace {

constexpr double kLogFloor = 1e-14;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Golden-section minimisation on [lo, hi] of a unimodal objective.
double golden_min(const std::function<double(double)>& f, double lo,
                  double hi, int iters = 200) {
  const double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < iters && (b - a) > 1e-15 * std::max(1.0, b); ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

// Coarse log-spaced scan followed by golden-section refinement; robust when
// the objective is only locally unimodal.
double scan_then_golden(const std::function<double(double)>& f, double lo,
                        double hi, int scan_points = 1200) {
  double best_x = lo, best_f = f(lo);
  for (int i = 0; i <= scan_points; ++i) {
    const double x = lo + (hi - lo) * i / scan_points;
    const double v = f(x);
    if (v < best_f) {
      best_f = v;
      best_x = x;
    }
  }
  const double step = (hi - lo) / scan_points;
  return golden_min(f, std::max(lo, best_x - step),
                    std::min(hi, best_x + step));
}

}  // namespace

double markov_prob(double p, Pattern alpha, int n) {
  if (p < 0.0 || p > 1.0) throw config_error("markov_prob: p outside [0,1]");
  const int h = h_count(alpha, n).h;
  return std::pow(p, h) * std::pow(1.0 - p, n - h);
}

RVec markov_model_probs(double p, int n) {
  RVec out(1ll << n);
  for (Pattern alpha = 0; alpha < (1u << n); ++alpha)
    out(alpha) = markov_prob(p, alpha, n);
  return out;
}

namespace {

double markov_log_objective(const ErrorDistribution& dist, double p) {
  double obj = 0.0;
  for (Pattern alpha = 0; alpha < static_cast<Pattern>(dist.size());
       ++alpha) {
    const double exact = dist.probs(alpha);
    if (exact < kLogFloor) continue;
    const int h = dist.h[alpha];
    const double model_log =
        h * std::log(p) + (dist.n - h) * std::log(1.0 - p);
    const double r = model_log - std::log(exact);
    obj += r * r;
  }
  return obj;
}

}  // namespace

FitReport fit_markov(const ErrorDistribution& dist, MarkovFitMode mode) {
  FitReport report;
  const int n = dist.n;

  bool any_error_band = false;
  for (Pattern alpha = 0; alpha < static_cast<Pattern>(dist.size()); ++alpha)
    if (dist.h[alpha] > 0 && dist.probs(alpha) >= kLogFloor)
      any_error_band = true;
  if (!any_error_band) {
    report.params["p"] = 0.0;
    report.note = "degenerate distribution: only the h = 0 band is populated";
    report.residuals = RVec::Zero(dist.size());
    return report;
  }

  double p = 0.0;
  if (mode == MarkovFitMode::LeastSquaresLog) {
    p = golden_min([&](double x) { return markov_log_objective(dist, x); },
                   1e-6, 0.5);
    report.objective = markov_log_objective(dist, p);
  } else {
    // Smallest p whose model dominates each pattern: for h >= 1 the model
    // grows on [0, h/n], so the per-pattern threshold is found by bisection
    // and the answer is the largest threshold. The h = 0 pattern caps p
    // from above and decides attainability.
    double p_required = 0.0;
    for (Pattern alpha = 0; alpha < static_cast<Pattern>(dist.size());
         ++alpha) {
      const int h = dist.h[alpha];
      const double exact = dist.probs(alpha);
      if (h == 0 || exact <= 0.0) continue;
      const double hi = static_cast<double>(h) / n;
      if (markov_prob(hi, alpha, n) < exact) {
        report.attainable = false;
        p_required = std::max(p_required, hi);
        continue;
      }
      double lo = 0.0, up = hi;
      for (int it = 0; it < 200 && (up - lo) > 1e-16; ++it) {
        const double mid = 0.5 * (lo + up);
        (markov_prob(mid, alpha, n) >= exact ? up : lo) = mid;
      }
      p_required = std::max(p_required, up);
    }
    p = p_required;
    if (std::pow(1.0 - p, n) < dist.probs(0)) report.attainable = false;
    if (!report.attainable)
      report.note = "no single p dominates every pattern";
  }

  report.params["p"] = p;
  report.residuals = RVec::Zero(dist.size());
  const RVec model = markov_model_probs(p, n);
  for (Pattern alpha = 0; alpha < static_cast<Pattern>(dist.size());
       ++alpha) {
    const double exact = dist.probs(alpha);
    if (exact >= kLogFloor && model(alpha) > 0.0)
      report.residuals(alpha) = std::log(model(alpha)) - std::log(exact);
    if (model(alpha) < exact)
      report.bound_violations.emplace_back(alpha, exact - model(alpha));
  }
  return report;
}

Pattern trajectory_pattern(const std::vector<Step>& steps) {
  Pattern alpha = 0;
  for (std::size_t idx = 0; idx < steps.size(); ++idx) {
    const int i = static_cast<int>(idx) + 1;
    switch (steps[idx]) {
      case Step::I:
        break;
      case Step::X:
        alpha ^= (1u << (i - 1));
        break;
      case Step::Y:
        alpha ^= (1u << (i - 1));
        if (i >= 2) alpha ^= (1u << (i - 2));
        break;
      case Step::Z:
        if (i >= 2) alpha ^= (1u << (i - 2));
        break;
    }
  }
  return alpha;
}

void TrajectoryModel::validate() const {
  if (n < 1) throw config_error("TrajectoryModel: n must be >= 1");
  for (double p : {p_x, p_y, p_z})
    if (p < 0.0 || p > 1.0)
      throw config_error("TrajectoryModel: probabilities must be in [0,1]");
  if (p_x + p_y + p_z > 1.0 + 1e-15)
    throw config_error("TrajectoryModel: p_x + p_y + p_z must be <= 1");
}

namespace {

// Trajectory probabilities depend only on the per-kind counts, so the 4^n
// enumeration is aggregated once into per-pattern multiplicity terms
// (n_x, n_y, n_z, count) and each model evaluation is a short polynomial.
struct TrajectoryTable {
  int n = 0;
  std::vector<std::vector<std::array<std::int64_t, 4>>> terms;
};

TrajectoryTable build_trajectory_table(int n) {
  TrajectoryTable table;
  table.n = n;
  const int stride = n + 1;
  // dense (pattern, nx, ny, nz) counts, flattened
  std::vector<std::int64_t> counts(
      (1ll << n) * stride * stride * stride, 0);

  const std::int64_t total = 1ll << (2 * n);
  for (std::int64_t code = 0; code < total; ++code) {
    std::int64_t c = code;
    int nx = 0, ny = 0, nz = 0;
    Pattern alpha = 0;
    for (int i = 1; i <= n; ++i, c >>= 2) {
      switch (c & 3) {
        case 0:
          break;
        case 1:
          ++nx;
          alpha ^= (1u << (i - 1));
          break;
        case 2:
          ++ny;
          alpha ^= (1u << (i - 1));
          if (i >= 2) alpha ^= (1u << (i - 2));
          break;
        case 3:
          ++nz;
          if (i >= 2) alpha ^= (1u << (i - 2));
          break;
      }
    }
    ++counts[((static_cast<std::int64_t>(alpha) * stride + nx) * stride + ny) *
                 stride +
             nz];
  }

  table.terms.resize(1ll << n);
  for (std::int64_t alpha = 0; alpha < (1ll << n); ++alpha)
    for (int nx = 0; nx <= n; ++nx)
      for (int ny = 0; ny + nx <= n; ++ny)
        for (int nz = 0; nz + ny + nx <= n; ++nz) {
          const std::int64_t cnt =
              counts[((alpha * stride + nx) * stride + ny) * stride + nz];
          if (cnt > 0) table.terms[alpha].push_back({nx, ny, nz, cnt});
        }
  return table;
}

RVec evaluate_trajectory_table(const TrajectoryTable& table,
                               const TrajectoryModel& model) {
  const int n = table.n;
  const double pi = 1.0 - model.p_x - model.p_y - model.p_z;
  std::vector<double> pow_x(n + 1, 1.0), pow_y(n + 1, 1.0), pow_z(n + 1, 1.0),
      pow_i(n + 1, 1.0);
  for (int k = 1; k <= n; ++k) {
    pow_x[k] = pow_x[k - 1] * model.p_x;
    pow_y[k] = pow_y[k - 1] * model.p_y;
    pow_z[k] = pow_z[k - 1] * model.p_z;
    pow_i[k] = pow_i[k - 1] * pi;
  }
  RVec probs = RVec::Zero(1ll << n);
  for (std::int64_t alpha = 0; alpha < (1ll << n); ++alpha) {
    double p = 0.0;
    for (const auto& [nx, ny, nz, cnt] : table.terms[alpha])
      p += static_cast<double>(cnt) * pow_x[nx] * pow_y[ny] * pow_z[nz] *
           pow_i[n - nx - ny - nz];
    probs(alpha) = p;
  }
  return probs;
}

}  // namespace

RVec trajectory_distribution(const TrajectoryModel& model, int max_steps) {
  model.validate();
  if (model.n > max_steps)
    throw resource_error("trajectory_distribution: n = " +
                         std::to_string(model.n) +
                         " exceeds enumeration limit " +
                         std::to_string(max_steps));
  return evaluate_trajectory_table(build_trajectory_table(model.n), model);
}

namespace {

double trajectory_log_objective(const ErrorDistribution& dist,
                                const RVec& model) {
  double obj = 0.0;
  for (Pattern alpha = 0; alpha < static_cast<Pattern>(dist.size());
       ++alpha) {
    const double exact = dist.probs(alpha);
    if (exact < kLogFloor) continue;
    if (model(alpha) <= 0.0) return kInf;
    const double r = std::log(model(alpha)) - std::log(exact);
    obj += r * r;
  }
  return obj;
}

// Deterministic Nelder-Mead on the 3-simplex.
std::array<double, 3> nelder_mead(
    const std::function<double(const std::array<double, 3>&)>& f,
    std::array<double, 3> start, double scale, int iters) {
  using Point = std::array<double, 3>;
  std::array<std::pair<double, Point>, 4> simplex;
  simplex[0] = {f(start), start};
  for (int k = 0; k < 3; ++k) {
    Point p = start;
    p[k] += scale;
    simplex[k + 1] = {f(p), p};
  }
  auto by_value = [](const auto& a, const auto& b) {
    return a.first < b.first;
  };
  for (int it = 0; it < iters; ++it) {
    std::sort(simplex.begin(), simplex.end(), by_value);
    Point centroid = {0, 0, 0};
    for (int s = 0; s < 3; ++s)
      for (int k = 0; k < 3; ++k) centroid[k] += simplex[s].second[k] / 3.0;
    const Point& worst = simplex[3].second;
    auto blend = [&](double t) {
      Point p;
      for (int k = 0; k < 3; ++k)
        p[k] = centroid[k] + t * (centroid[k] - worst[k]);
      return p;
    };
    const Point reflect = blend(1.0);
    const double fr = f(reflect);
    if (fr < simplex[0].first) {
      const Point expand = blend(2.0);
      const double fe = f(expand);
      simplex[3] = fe < fr ? std::make_pair(fe, expand)
                           : std::make_pair(fr, reflect);
    } else if (fr < simplex[2].first) {
      simplex[3] = {fr, reflect};
    } else {
      const Point contract = blend(-0.5);
      const double fc = f(contract);
      if (fc < simplex[3].first) {
        simplex[3] = {fc, contract};
      } else {
        for (int s = 1; s < 4; ++s) {
          Point p;
          for (int k = 0; k < 3; ++k)
            p[k] = 0.5 * (simplex[0].second[k] + simplex[s].second[k]);
          simplex[s] = {f(p), p};
        }
      }
    }
  }
  std::sort(simplex.begin(), simplex.end(), by_value);
  return simplex[0].second;
}

}  // namespace

FitReport fit_trajectory(const ErrorDistribution& dist, int max_steps) {
  const int n = dist.n;
  if (n > max_steps)
    throw resource_error("fit_trajectory: n exceeds enumeration limit");
  const TrajectoryTable table = build_trajectory_table(n);

  FitReport report;
  bool any_error_band = false;
  for (Pattern alpha = 0; alpha < static_cast<Pattern>(dist.size()); ++alpha)
    if (dist.h[alpha] > 0 && dist.probs(alpha) >= kLogFloor)
      any_error_band = true;
  if (!any_error_band) {
    report.params["p_x"] = report.params["p_y"] = report.params["p_z"] = 0.0;
    report.note = "degenerate distribution: only the h = 0 band is populated";
    report.residuals = RVec::Zero(dist.size());
    return report;
  }

  auto objective = [&](const std::array<double, 3>& p) {
    if (p[0] < 0.0 || p[1] < 0.0 || p[2] < 0.0 ||
        p[0] + p[1] + p[2] > 1.0)
      return kInf;
    TrajectoryModel m{p[0], p[1], p[2], n};
    return trajectory_log_objective(dist, evaluate_trajectory_table(table, m));
  };

  std::array<double, 3> best = {0.0, 0.0, 0.0};
  double best_obj = kInf;
  const int grid = 100;  // step 0.01
  for (int ix = 0; ix <= grid; ++ix)
    for (int iy = 0; iy + ix <= grid; ++iy)
      for (int iz = 0; iz + iy + ix <= grid; ++iz) {
        const std::array<double, 3> p = {ix / 100.0, iy / 100.0, iz / 100.0};
        const double v = objective(p);
        if (v < best_obj) {
          best_obj = v;
          best = p;
        }
      }
  best = nelder_mead(objective, best, 0.005, 400);

  TrajectoryModel model{best[0], best[1], best[2], n};
  const RVec model_probs = evaluate_trajectory_table(table, model);
  report.params["p_x"] = best[0];
  report.params["p_y"] = best[1];
  report.params["p_z"] = best[2];
  report.objective = objective(best);
  report.residuals = RVec::Zero(dist.size());
  for (Pattern alpha = 0; alpha < static_cast<Pattern>(dist.size());
       ++alpha) {
    const double exact = dist.probs(alpha);
    if (exact >= kLogFloor && model_probs(alpha) > 0.0)
      report.residuals(alpha) =
          std::log(model_probs(alpha)) - std::log(exact);
    if (model_probs(alpha) < exact)
      report.bound_violations.emplace_back(alpha, exact - model_probs(alpha));
  }
  return report;
}

double scaling_model(ScalingForm form, double a, double second,
                     double n_sites) {
  const double x = std::abs(a) / (n_sites * n_sites);
  if (form == ScalingForm::Exact)
    return second * (1.0 - 1.0 / std::sqrt(1.0 + x));
  return second - 1.0 / std::sqrt(1.0 - x);
}

FitReport scaling_fit(const std::vector<std::pair<double, double>>& points,
                      ScalingForm form) {
  const int min_points = form == ScalingForm::Exact ? 3 : 4;
  if (static_cast<int>(points.size()) < min_points)
    throw config_error("scaling_fit: needs at least " +
                       std::to_string(min_points) + " points");
  double n_min = kInf, y_max = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].first <= 0.0)
      throw config_error("scaling_fit: N values must be positive");
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (points[i].first == points[j].first)
        throw config_error("scaling_fit: N values must be distinct");
    n_min = std::min(n_min, points[i].first);
    y_max = std::max(y_max, std::abs(points[i].second));
  }

  FitReport report;
  if (y_max == 0.0) {
    report.params["a"] = 0.0;
    report.params[form == ScalingForm::Exact ? "s" : "c"] =
        form == ScalingForm::Exact ? 0.0 : 1.0;
    report.params["rel_rms"] = 0.0;
    report.residuals = RVec::Zero(points.size());
    return report;
  }

  // the second parameter is linear in the model, so it has a closed form
  // for any fixed a
  auto best_second = [&](double a) {
    if (form == ScalingForm::Exact) {
      double num = 0.0, den = 0.0;
      for (const auto& [nn, y] : points) {
        const double f = 1.0 - 1.0 / std::sqrt(1.0 + std::abs(a) / (nn * nn));
        num += y * f;
        den += f * f;
      }
      return den > 0.0 ? num / den : 0.0;
    }
    double c = 0.0;
    for (const auto& [nn, y] : points)
      c += y + 1.0 / std::sqrt(1.0 - std::abs(a) / (nn * nn));
    return c / points.size();
  };
  auto sum_sq = [&](double a) {
    const double second = best_second(a);
    double s = 0.0;
    for (const auto& [nn, y] : points) {
      const double r = y - scaling_model(form, a, second, nn);
      s += r * r;
    }
    return std::isfinite(s) ? s : kInf;
  };

  const double a_hi = form == ScalingForm::Exact
                          ? 1e8
                          : 0.999999 * n_min * n_min;
  const double a = scan_then_golden(sum_sq, 0.0, a_hi, 100000);
  const double second = best_second(a);

  report.params["a"] = a;
  report.params[form == ScalingForm::Exact ? "s" : "c"] = second;
  report.objective = sum_sq(a);
  report.residuals = RVec(points.size());
  double y_sq = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    report.residuals(i) =
        points[i].second - scaling_model(form, a, second, points[i].first);
    y_sq += points[i].second * points[i].second;
  }
  report.params["rel_rms"] = std::sqrt(report.objective / y_sq);
  return report;
}

}  // namespace cserr
