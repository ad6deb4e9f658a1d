#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "forumnet/graph.hpp"

namespace forumnet::fixtures {

/// Equal-weight sample set, sorted.
struct Samples {
  std::vector<double> values;
};

inline double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double pop_sd(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

/// Integral over u in [0,1] of |Q_b(u) - Q_a(u) - c|, with quantile functions
/// of equal-weight samples. Breakpoints at i/na and j/nb.
inline double quantile_gap_integral(std::vector<double> a, std::vector<double> b, double c) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::vector<double> cuts;
  for (std::size_t i = 0; i <= a.size(); ++i) cuts.push_back(static_cast<double>(i) / na);
  for (std::size_t j = 0; j <= b.size(); ++j) cuts.push_back(static_cast<double>(j) / nb);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k], hi = cuts[k + 1];
    if (hi - lo <= 0.0) continue;
    const double mid = 0.5 * (lo + hi);
    const auto ia = std::min(a.size() - 1, static_cast<std::size_t>(mid * na));
    const auto ib = std::min(b.size() - 1, static_cast<std::size_t>(mid * nb));
    total += (hi - lo) * std::abs(b[ib] - a[ia] - c);
  }
  return total;
}

/// Minimum of a convex function over [lo, hi] by repeated grid refinement.
inline double grid_minimum(const std::function<double(double)>& f, double lo, double hi, double final_step = 1e-10) {
  double step = (hi - lo) / 1000.0;
  double best_x = lo, best = f(lo);
  while (true) {
    for (double x = lo; x <= hi + 0.5 * step; x += step) {
      const double v = f(x);
      if (v < best) {
        best = v;
        best_x = x;
      }
    }
    if (step <= final_step) break;
    lo = best_x - step;
    hi = best_x + step;
    step /= 100.0;
  }
  return best;
}

/// EMD* oracle on raw samples: rescale by population sd (point masses stay
/// unscaled) and grid-minimize over the translation.
inline double emd_star_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  const double sa = pop_sd(a), sb = pop_sd(b);
  if (sa == 0.0 && sb == 0.0) return 0.0;
  std::vector<double> x = a, y = b;
  if (sa > 0.0)
    for (double& v : x) v /= sa;
  if (sb > 0.0)
    for (double& v : y) v /= sb;
  const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
  const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  const double lo = *ymin - *xmax - 1.0, hi = *ymax - *xmin + 1.0;
  return grid_minimum([&](double c) { return quantile_gap_integral(x, y, c); }, lo, hi);
}

/// Dense X * X^T with the diagonal cleared; row-major users x users.
inline std::vector<double> dense_projection(const BipartiteGraph& b) {
  const std::size_t nu = b.user_count(), nt = b.thread_count();
  std::vector<double> x(nu * nt, 0.0), a(nu * nu, 0.0);
  for (const auto& e : b.entries()) x[e.user * nt + e.thread] = e.posts;
  for (std::size_t i = 0; i < nu; ++i)
    for (std::size_t j = 0; j < nu; ++j) {
      if (i == j) continue;
      double s = 0.0;
      for (std::size_t t = 0; t < nt; ++t) s += x[i * nt + t] * x[j * nt + t];
      a[i * nu + j] = s;
    }
  return a;
}

/// Number of non-isolated nodes of g left isolated when only edges with
/// weight >= theta are kept.
inline std::size_t isolated_after(const WeightedGraph& g, double theta) {
  std::vector<int> before(g.node_count(), 0), after(g.node_count(), 0);
  for (const auto& e : g.edges()) {
    before[e.u] = before[e.v] = 1;
    if (e.weight >= theta) after[e.u] = after[e.v] = 1;
  }
  std::size_t n = 0;
  for (std::size_t v = 0; v < g.node_count(); ++v) n += before[v] && !after[v];
  return n;
}

/// Largest edge weight that, used as threshold, isolates no node.
inline double threshold_by_sweep(const WeightedGraph& g) {
  std::vector<double> candidates;
  for (const auto& e : g.edges()) candidates.push_back(e.weight);
  std::sort(candidates.begin(), candidates.end());
  double best = candidates.front();
  for (double c : candidates)
    if (isolated_after(g, c) == 0) best = c;
  return best;
}

}  // namespace forumnet::fixtures
