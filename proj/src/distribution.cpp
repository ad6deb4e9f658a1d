#include "forumnet/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "forumnet/error.hpp"

namespace forumnet {

namespace {

constexpr double kGoldenTolerance = 1e-9;
// Residual mass below this is treated as exhausted when walking quantiles.
constexpr double kMassEpsilon = 1e-15;
constexpr double kPointMassTolerance = 1e-9;

// Pieces of Q_q(u) - Q_p(u) over the merged quantile partition: the
// translation objective is sum_k mass_k * |c - gap_k|.
std::vector<std::pair<double, double>> quantile_gaps(const EmpiricalDistribution& p,
                                                     const EmpiricalDistribution& q) {
  auto xs = p.support(), xm = p.masses();
  auto ys = q.support(), ym = q.masses();
  std::vector<std::pair<double, double>> gaps;
  gaps.reserve(xs.size() + ys.size());
  std::size_t i = 0, j = 0;
  double left_p = xm[0], left_q = ym[0];
  while (i < xs.size() && j < ys.size()) {
    double take = std::min(left_p, left_q);
    if (take > 0.0) gaps.emplace_back(ys[j] - xs[i], take);
    left_p -= take;
    left_q -= take;
    if (left_p <= kMassEpsilon) {
      if (++i < xs.size()) left_p += xm[i];
    }
    if (left_q <= kMassEpsilon) {
      if (++j < ys.size()) left_q += ym[j];
    }
  }
  std::sort(gaps.begin(), gaps.end());
  return gaps;
}

}  // namespace

EmpiricalDistribution EmpiricalDistribution::from_samples(std::span<const double> values) {
  if (values.empty()) throw ValidationError("cannot build a distribution from no samples");
  std::vector<double> sorted(values.begin(), values.end());
  for (double v : sorted)
    if (!std::isfinite(v)) throw ValidationError("distribution samples must be finite");
  std::sort(sorted.begin(), sorted.end());
  EmpiricalDistribution d;
  const double unit = 1.0 / static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t k = i;
    while (k < sorted.size() && sorted[k] == sorted[i]) ++k;
    d.support_.push_back(sorted[i]);
    d.masses_.push_back(static_cast<double>(k - i) * unit);
    i = k;
  }
  // Moments from the raw samples so they are the exact population statistics.
  double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) * unit;
  double var = 0.0;
  for (double v : sorted) var += (v - mean) * (v - mean);
  d.mean_ = mean;
  d.variance_ = var * unit;
  return d;
}

EmpiricalDistribution EmpiricalDistribution::from_masses(std::vector<double> support,
                                                         std::vector<double> masses) {
  if (support.empty() || support.size() != masses.size())
    throw ValidationError("support and masses must be non-empty and of equal length");
  double total = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (!std::isfinite(support[i]) || !(masses[i] > 0.0))
      throw ValidationError("support must be finite and masses positive");
    if (i > 0 && !(support[i] > support[i - 1]))
      throw ValidationError("support must be strictly increasing");
    total += masses[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw ValidationError("masses must sum to 1");
  EmpiricalDistribution d;
  d.support_ = std::move(support);
  d.masses_ = std::move(masses);
  d.refresh_moments();
  return d;
}

void EmpiricalDistribution::refresh_moments() {
  double mean = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) mean += support_[i] * masses_[i];
  double var = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i)
    var += masses_[i] * (support_[i] - mean) * (support_[i] - mean);
  mean_ = mean;
  variance_ = var;
}

double EmpiricalDistribution::stddev() const { return std::sqrt(variance_); }

EmpiricalDistribution EmpiricalDistribution::affine(double a, double b) const {
  if (!(a > 0.0)) throw ValidationError("affine scale must be positive");
  EmpiricalDistribution d = *this;
  for (double& x : d.support_) x = a * x + b;
  d.mean_ = a * mean_ + b;
  d.variance_ = a * a * variance_;
  return d;
}

double shifted_emd(const EmpiricalDistribution& p, const EmpiricalDistribution& q, double c) {
  auto xs = p.support(), xm = p.masses();
  auto ys = q.support(), ym = q.masses();
  std::size_t i = 0, j = 0;
  double fp = 0.0, fq = 0.0;
  double prev = std::min(xs[0] + c, ys[0]);
  double area = 0.0;
  while (i < xs.size() || j < ys.size()) {
    double next_x = i < xs.size() ? xs[i] + c : INFINITY;
    double next_y = j < ys.size() ? ys[j] : INFINITY;
    double at = std::min(next_x, next_y);
    area += std::abs(fp - fq) * (at - prev);
    prev = at;
    if (next_x == at) fp += xm[i++];
    if (next_y == at) fq += ym[j++];
  }
  return area;
}

double emd(const EmpiricalDistribution& p, const EmpiricalDistribution& q) {
  return shifted_emd(p, q, 0.0);
}

AlignmentResult emd_star(const EmpiricalDistribution& p, const EmpiricalDistribution& q) {
  // Spread at rounding level (e.g. a constant column after a PCA round trip)
  // counts as a point mass.
  auto spread = [](const EmpiricalDistribution& d) {
    const double scale = std::max({1.0, std::abs(d.support().front()), std::abs(d.support().back())});
    const double sd = d.stddev();
    return sd <= kPointMassTolerance * scale ? 0.0 : sd;
  };
  const double sp = spread(p), sq = spread(q);
  const auto ps = p.affine(sp > 0.0 ? 1.0 / sp : 1.0, 0.0);
  const auto qs = q.affine(sq > 0.0 ? 1.0 / sq : 1.0, 0.0);
  const double center = qs.mean() - ps.mean();
  if (sp == 0.0 && sq == 0.0) return {0.0, center};

  auto range = [](const EmpiricalDistribution& d) { return d.support().back() - d.support().front(); };
  const double reach = range(ps) + range(qs);
  auto objective = [&](double c) { return shifted_emd(ps, qs, c); };

  // Golden-section search on the convex objective.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = center - reach, hi = center + reach;
  double a = hi - inv_phi * (hi - lo), b = lo + inv_phi * (hi - lo);
  double fa = objective(a), fb = objective(b);
  while (hi - lo > kGoldenTolerance) {
    if (fa <= fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = objective(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = objective(b);
    }
  }
  double best_c = 0.5 * (lo + hi);
  double best = objective(best_c);

  // The objective is piecewise linear with kinks at the quantile gaps; walk
  // from the kink nearest the golden-section estimate to where the slope
  // changes sign.
  const auto gaps = quantile_gaps(ps, qs);
  std::vector<double> below(gaps.size() + 1, 0.0);  // mass strictly left of gap k
  for (std::size_t k = 0; k < gaps.size(); ++k) below[k + 1] = below[k] + gaps[k].second;
  const double total = below.back();
  auto it = std::lower_bound(gaps.begin(), gaps.end(), std::pair<double, double>{best_c, -std::numeric_limits<double>::infinity()});
  std::size_t k = it == gaps.end() ? gaps.size() - 1 : static_cast<std::size_t>(it - gaps.begin());
  if (k > 0 && std::abs(gaps[k - 1].first - best_c) < std::abs(gaps[k].first - best_c)) --k;
  const double half = 0.5 * total;
  for (;;) {
    const double left = below[k];
    const double right = total - below[k + 1];
    if (right > half + kMassEpsilon && k + 1 < gaps.size()) ++k;
    else if (left > half + kMassEpsilon && k > 0) --k;
    else break;
  }
  const double kink = gaps[k].first;
  const double at_kink = objective(kink);
  if (at_kink <= best) {
    best = at_kink;
    best_c = kink;
  }
  return {std::max(best, 0.0), best_c};
}

}  // namespace forumnet
