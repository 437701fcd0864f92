#include "cserr/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace cserr {

std::pair<Mat, Mat> m_operators(const Mat& u_plus, const Mat& u_minus) {
  for (const Mat* u : {&u_plus, &u_minus}) {
    const double defect = unitarity_defect(*u);
    if (defect > kUnitaryTol)
      throw invariant_error("m_operators: input not unitary, defect = " +
                            std::to_string(defect));
  }
  Mat m_plus = 0.5 * (u_minus + u_plus);
  Mat m_minus = cx(0, 0.5) * (u_minus - u_plus);
  return {std::move(m_plus), std::move(m_minus)};
}

Mat pd_error_operator(Pattern alpha, int n, const Mat& m_plus,
                      const Mat& m_minus) {
  const auto hc = h_count(alpha, n);
  Mat o = Mat::Identity(m_plus.rows(), m_plus.cols());
  for (int i = 1; i <= n; ++i) {
    const Mat& factor = (hc.f[i - 1] & 1) ? m_minus : m_plus;
    o = factor * o;  // factor i = 1 rightmost
  }
  return o;
}

double bound_eq5(Pattern alpha, int n, double p_plus, double p_minus) {
  const int h = h_count(alpha, n).h;
  return std::pow(p_minus, h) * std::pow(p_plus, n - h);
}

std::vector<double> sector_norms(const Mat& m_op,
                                 const std::vector<SectorProjector>& sectors) {
  std::vector<double> out;
  out.reserve(sectors.size());
  for (const auto& sec : sectors) {
    const Mat block = sector_block(m_op, sec);
    out.push_back(psd_norm(block.adjoint() * block));
  }
  return out;
}

BoundReport compute_bounds(int n, const HamiltonianSet& set,
                           const EnvState& env) {
  if (env.N != set.N) throw config_error("compute_bounds: size mismatch");
  const auto [u_plus, u_minus] = u_pm_pair(set);
  const auto [m_plus, m_minus] = m_operators(u_plus, u_minus);
  const auto sectors = sector_projectors(set.N);

  BoundReport report;
  report.n = n;
  report.p_plus_sector = sector_norms(m_plus, sectors);
  report.p_minus_sector = sector_norms(m_minus, sectors);
  // U_pm are block-diagonal, so the global norm is the sector maximum.
  report.p_plus = *std::max_element(report.p_plus_sector.begin(),
                                    report.p_plus_sector.end());
  report.p_minus = *std::max_element(report.p_minus_sector.begin(),
                                     report.p_minus_sector.end());
  if (report.p_plus > 1.0 + kProbClamp || report.p_minus > 1.0 + kProbClamp)
    throw invariant_error("compute_bounds: ||M^dag M|| exceeds 1");

  const auto [weights, coherent] = env.sector_weights();
  report.sector_weights = weights;
  report.cross_sector_coherence = coherent;
  int occupied = 0;
  for (Eigen::Index s = 0; s < weights.size(); ++s)
    if (weights(s) > 0.0) ++occupied;
  report.multi_sector = occupied > 1;

  const std::int64_t dim = 1ll << n;
  report.eq5 = RVec(dim);
  report.eq6 = RVec(dim);
  for (Pattern alpha = 0; alpha < static_cast<Pattern>(dim); ++alpha) {
    const int h = h_count(alpha, n).h;
    report.eq5(alpha) = std::pow(report.p_minus, h) *
                        std::pow(report.p_plus, n - h);
    double eq6 = 0.0;
    for (std::size_t s = 0; s < sectors.size(); ++s) {
      const double w = weights(static_cast<Eigen::Index>(s));
      if (w == 0.0) continue;
      eq6 += w * std::pow(report.p_minus_sector[s], h) *
             std::pow(report.p_plus_sector[s], n - h);
    }
    report.eq6(alpha) = eq6;
  }
  return report;
}

std::vector<BandStats> band_summary(const ErrorDistribution& dist,
                                    double log_floor) {
  std::vector<BandStats> bands(dist.n + 1);
  for (int h = 0; h <= dist.n; ++h) bands[h].h = h;
  for (Pattern alpha = 0; alpha < static_cast<Pattern>(dist.size()); ++alpha) {
    const int h = dist.h[alpha];
    BandStats& b = bands[h];
    const double p = dist.probs(alpha);
    if (b.count == 0) {
      b.min_p = b.max_p = p;
    } else {
      b.min_p = std::min(b.min_p, p);
      b.max_p = std::max(b.max_p, p);
    }
    b.mean_p += p;
    ++b.count;
    if (p > log_floor) {
      b.mean_log10_p += std::log10(p);
      ++b.log_count;
    }
  }
  for (auto& b : bands) {
    if (b.count > 0) b.mean_p /= b.count;
    if (b.log_count > 0) b.mean_log10_p /= b.log_count;
  }
  return bands;
}

std::vector<Pattern> band_order(int n) {
  std::vector<Pattern> order(1u << n);
  for (Pattern alpha = 0; alpha < order.size(); ++alpha) order[alpha] = alpha;
  std::stable_sort(order.begin(), order.end(), [n](Pattern a, Pattern b) {
    const int ha = h_count(a, n).h, hb = h_count(b, n).h;
    return ha != hb ? ha < hb : a < b;
  });
  return order;
}

}  // namespace cserr
