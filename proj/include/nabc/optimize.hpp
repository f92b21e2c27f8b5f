#pragma once

#include <algorithm>
#include <functional>

#include <Eigen/Core>

namespace nabc {

struct ControlChoice {
  double control;
  double value;
};

inline constexpr int kControlGridPoints = 51;
inline constexpr double kControlTolerance = 1e-4;

/// Maximizes a scalar objective over [0, 1]: a uniform grid, then
/// golden-section refinement inside the bracket around the best grid point.
/// Ties resolve toward the smallest control.
template <typename Estimator>
ControlChoice optimize_control(Estimator&& estimator) {
  constexpr int last = kControlGridPoints - 1;
  int best_index = 0;
  double best_value = estimator(0.0);
  for (int k = 1; k <= last; ++k) {
    const double v = estimator(static_cast<double>(k) / last);
    if (v > best_value) {
      best_value = v;
      best_index = k;
    }
  }
  const double best_u = static_cast<double>(best_index) / last;

  constexpr double inv_phi = 0.6180339887498949;
  double a = static_cast<double>(std::max(best_index - 1, 0)) / last;
  double b = static_cast<double>(std::min(best_index + 1, last)) / last;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = estimator(c);
  double fd = estimator(d);
  while (b - a > kControlTolerance) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = estimator(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = estimator(d);
    }
  }
  const double refined_u = 0.5 * (a + b);
  const double refined_value = estimator(refined_u);
  if (refined_value > best_value || (refined_value == best_value && refined_u < best_u))
    return {refined_u, refined_value};
  return {best_u, best_value};
}

struct NelderMeadResult {
  Eigen::VectorXd point;
  double value;
  int evaluations;
};

/// Derivative-free minimization. Non-finite objective values are treated as +infinity.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                             const Eigen::VectorXd& start, double step, int max_evaluations,
                             double tolerance = 1e-8);

}  // namespace nabc
