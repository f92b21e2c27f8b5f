#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "nabc/measures.hpp"
#include "nabc/policy.hpp"

namespace nabc {

struct SummaryStats {
  double mean = 0.0;
  double var = 0.0;
  double q30 = 0.0;
  double q90 = 0.0;
  double max = 0.0;
  double min = 0.0;
};

struct EvalReport {
  Method method = Method::ab;
  std::optional<double> prior_mass;
  Eigen::VectorXd terminal_utilities;  // N'
  Eigen::MatrixXd strategy_paths;      // N' x T
  Eigen::MatrixXd wealth_paths;        // N' x (T + 1)
  Eigen::MatrixXd mean_paths;          // N' x (T + 1), adaptive estimator only
  Eigen::MatrixXd var_paths;           // N' x (T + 1), adaptive estimator only
  SummaryStats stats;
};

/// paths x horizon log-returns from `measure`, row by row.
Eigen::MatrixXd draw_noise(const MixtureMeasure& measure, int paths, int horizon, std::uint64_t seed);

/// Rolls every noise path forward under the policy's clamped controls.
/// The same noise array can be shared by several policies for a paired
/// comparison. A single path reports zero variance.
EvalReport simulate_out_of_sample(const Policy& policy, const Eigen::MatrixXd& noise, int threads = 1);

/// Linear interpolation between order statistics at rank 1 + (n - 1) p.
double quantile(std::span<const double> samples, double p);

/// Mean, unbiased variance, 30% and 90% quantiles, max and min.
SummaryStats summarize(std::span<const double> utilities);

}  // namespace nabc
