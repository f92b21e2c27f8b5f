#pragma once

#include <Eigen/Core>

#include "nabc/measures.hpp"

namespace nabc {

/// y (1 + r + u (e^z - 1 - r)). Positive whenever y > 0, u in [0, 1] and r > -1.
double wealth_step(double wealth, double control, double rate, double log_return);

/// CRRA utility (y^{1-eta} - 1) / (1 - eta), evaluated through expm1/log so that
/// eta close to one keeps full relative precision.
double utility(double wealth, double eta);

/// Wealth together with the current posterior-mean measure.
struct AugmentedState {
  double wealth;
  PosteriorState posterior;

  friend bool operator==(const AugmentedState&, const AugmentedState&) = default;
};

/// Joint update of wealth and posterior for one period.
AugmentedState transition(int stage, const AugmentedState& state, double control,
                          double log_return, double rate);

/// (wealth, m^1, ..., m^M)
Eigen::VectorXd reduce_state(const AugmentedState& state, int moments);

}  // namespace nabc
