#include "nabc/dynamics.hpp"

#include <cmath>

#include "nabc/errors.hpp"

namespace nabc {

double wealth_step(double wealth, double control, double rate, double log_return) {
  if (!(control >= 0.0 && control <= 1.0)) throw DomainError("wealth_step: control outside [0, 1]");
  if (!(wealth > 0.0)) throw DomainError("wealth_step: wealth must be positive");
  if (!(rate > -1.0)) throw DomainError("wealth_step: rate must exceed -1");
  // convex combination of the two gross returns
  return wealth * ((1.0 - control) * (1.0 + rate) + control * std::exp(log_return));
}

double utility(double wealth, double eta) {
  if (!(wealth > 0.0)) throw DomainError("utility: wealth must be positive");
  if (!(eta > 1.0)) throw DomainError("utility: risk aversion must exceed one");
  const double a = 1.0 - eta;
  return std::expm1(a * std::log(wealth)) / a;
}

AugmentedState transition(int stage, const AugmentedState& state, double control,
                          double log_return, double rate) {
  if (stage < 0) throw InputError("transition: negative stage index");
  return {wealth_step(state.wealth, control, rate, log_return),
          posterior_update(state.posterior, log_return)};
}

Eigen::VectorXd reduce_state(const AugmentedState& state, int moments) {
  Eigen::VectorXd coords(1 + moments);
  coords(0) = state.wealth;
  coords.tail(moments) = posterior_moments(state.posterior, moments);
  return coords;
}

}  // namespace nabc
