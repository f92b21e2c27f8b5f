#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "nabc/config.hpp"
#include "nabc/policy.hpp"

namespace nabc {

/// Gaussian point estimate with its effective observation count.
/// `var` follows the maximum-likelihood (divide by n) convention.
struct AdaptiveEstimate {
  double mean = 0.0;
  double var = 0.0;
  int count = 1;

  friend bool operator==(const AdaptiveEstimate&, const AdaptiveEstimate&) = default;
};

/// Sample mean and ML variance of at least two observations.
AdaptiveEstimate initial_estimates(std::span<const double> observations);

/// Running-MLE update with one observation:
///   mean' = (n mean + z) / (n + 1)
///   var'  = (n (n + 1) var + n (mean - z)^2) / (n + 1)^2
AdaptiveEstimate adaptive_update(const AdaptiveEstimate& estimate, double z);

/// chi-square quantile with two degrees of freedom.
inline double chi_square2_quantile(double level) { return -2.0 * std::log1p(-level); }

/// Asymptotic-likelihood ellipse for (mean, variance):
///   n (mu - mu_hat)^2 / s2 + n (v - s2)^2 / (2 s2^2) <= q
class ConfidenceRegion {
 public:
  ConfidenceRegion(const AdaptiveEstimate& center, double level);

  double center_mean() const { return center_.mean; }
  double center_var() const { return center_.var; }
  int count() const { return center_.count; }
  double level() const { return level_; }
  double radius_sq() const { return radius_sq_; }

  /// Left-hand side of the ellipse inequality.
  double statistic(double mean, double var) const;
  bool contains(double mean, double var) const { return var > 0.0 && statistic(mean, var) <= radius_sq_; }

  double mean_halfwidth() const;
  double var_halfwidth() const;

  /// Candidate parameters: `boundary_points` on the boundary, the center, and
  /// `rings` interior rings of boundary_points / rings points each. Variances
  /// are clipped to stay positive.
  std::vector<std::pair<double, double>> discretize(int boundary_points, int rings) const;

 private:
  AdaptiveEstimate center_;
  double level_;
  double radius_sq_;
};

ConfidenceRegion confidence_region(const AdaptiveEstimate& estimate, double level);

/// (mu0, sigma0^2) with count t0: the configured values, or the estimates from
/// t0 simulated observations of the sampling measure (history seed).
AdaptiveEstimate resolve_estimates(const ExperimentConfig& config);

/// Wealth-only sup-inf recursion over the discretized confidence region.
Policy solve_strong_robust(const ExperimentConfig& config, int threads = 1);

/// Time-consistent adaptive recursion on (wealth, mean estimate, variance estimate).
Policy solve_adaptive(const ExperimentConfig& config, int threads = 1);

}  // namespace nabc
