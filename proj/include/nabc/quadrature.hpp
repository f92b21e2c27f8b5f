#pragma once

#include <cmath>
#include <functional>
#include <numbers>

#include <Eigen/Core>

#include "nabc/errors.hpp"

namespace nabc {

/// Physicists' Gauss-Hermite rule: integral of e^{-x^2} f(x) ~ sum w_j f(x_j).
struct GaussHermiteRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

GaussHermiteRule gauss_hermite(int nodes);

/// E[f(Z)] for Z ~ N(mean, var), var > 0.
template <typename Integrand>
double gauss_hermite_expectation(Integrand&& integrand, double mean, double var,
                                 const GaussHermiteRule& rule) {
  if (!(var > 0.0)) throw InputError("gauss_hermite_expectation: variance must be positive");
  const double scale = std::sqrt(2.0 * var);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < rule.nodes.size(); ++j) {
    const double v = integrand(mean + scale * rule.nodes(j));
    if (!std::isfinite(v)) throw InputError("gauss_hermite_expectation: non-finite integrand value");
    sum += rule.weights(j) * v;
  }
  return sum / std::sqrt(std::numbers::pi);
}

double gauss_hermite_expectation(const std::function<double(double)>& integrand, double mean,
                                 double var, int nodes);

}  // namespace nabc
