#pragma once

#include <span>
#include <vector>

namespace forumnet {

/// Discrete 1-D distribution with strictly increasing support.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;

  /// Equal mass per sample, duplicates merged. Throws on empty or non-finite input.
  static EmpiricalDistribution from_samples(std::span<const double> values);
  /// Support must be strictly increasing, masses positive and summing to 1.
  static EmpiricalDistribution from_masses(std::vector<double> support, std::vector<double> masses);

  std::span<const double> support() const { return support_; }
  std::span<const double> masses() const { return masses_; }
  double mean() const { return mean_; }
  /// Population variance.
  double variance() const { return variance_; }
  double stddev() const;

  /// Distribution of a * X + b for a > 0.
  EmpiricalDistribution affine(double a, double b) const;

 private:
  void refresh_moments();

  std::vector<double> support_;
  std::vector<double> masses_;
  double mean_ = 0.0;
  double variance_ = 0.0;
};

inline EmpiricalDistribution make_distribution(std::span<const double> values) {
  return EmpiricalDistribution::from_samples(values);
}

/// Wasserstein-1 distance: the area between the two CDFs.
double emd(const EmpiricalDistribution& p, const EmpiricalDistribution& q);

struct AlignmentResult {
  double distance = 0.0;
  /// Translation c applied to the rescaled p that achieves the distance.
  double offset = 0.0;
};

/// EMD between the unit-variance rescalings of p and q, minimized over a
/// translation of p. A zero-variance input (up to rounding) is left unscaled; if both are
/// point masses the distance is 0.
AlignmentResult emd_star(const EmpiricalDistribution& p, const EmpiricalDistribution& q);

/// emd(p shifted by c, q) where both are taken as given (no rescaling).
double shifted_emd(const EmpiricalDistribution& p, const EmpiricalDistribution& q, double c);

}  // namespace forumnet
