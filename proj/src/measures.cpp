#include "nabc/measures.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "nabc/errors.hpp"

namespace nabc {

PosteriorState::PosteriorState(double prior_mass, double base_mean, double base_var,
                               std::vector<double> atoms)
    : prior_mass_(prior_mass), base_mean_(base_mean), base_var_(base_var), atoms_(std::move(atoms)) {
  if (!(prior_mass_ > 0.0) || !std::isfinite(prior_mass_))
    throw InputError("posterior: prior mass c0 must be positive and finite");
  if (!(base_var_ > 0.0) || !std::isfinite(base_var_) || !std::isfinite(base_mean_))
    throw InputError("posterior: base measure needs a finite mean and positive variance");
  for (double z : atoms_)
    if (!std::isfinite(z)) throw InputError("posterior: atoms must be finite");
}

PosteriorState posterior_update(const PosteriorState& state, double z) {
  if (!std::isfinite(z)) throw InputError("posterior_update: observation must be finite");
  std::vector<double> atoms = state.atoms();
  atoms.push_back(z);
  return PosteriorState(state.prior_mass(), state.base_mean(), state.base_var(), std::move(atoms));
}

MomentVector gaussian_raw_moments(double mean, double var, int order) {
  if (order < 1 || order > kMaxMoments)
    throw InputError("gaussian_raw_moments: order must lie in [1, " +
                     std::to_string(kMaxMoments) + "]");
  if (!(var > 0.0)) throw InputError("gaussian_raw_moments: variance must be positive");
  // E[X^k] = mean E[X^{k-1}] + (k-1) var E[X^{k-2}]
  MomentVector m(order);
  double prev2 = 1.0;
  double prev1 = mean;
  m(0) = mean;
  for (int k = 2; k <= order; ++k) {
    const double next = mean * prev1 + (k - 1) * var * prev2;
    m(k - 1) = next;
    prev2 = prev1;
    prev1 = next;
  }
  return m;
}

MomentVector posterior_moments(const PosteriorState& state, int order) {
  MomentVector m = state.prior_mass() * gaussian_raw_moments(state.base_mean(), state.base_var(), order);
  for (double z : state.atoms()) {
    double power = 1.0;
    for (int k = 0; k < order; ++k) {
      power *= z;
      m(k) += power;
    }
  }
  return m / state.total_mass();
}

std::vector<double> sample_posterior_mean(const PosteriorState& state, std::size_t count, Rng& rng) {
  std::vector<double> draws;
  draws.reserve(count);
  const double base_weight = state.base_weight();
  const double base_sd = std::sqrt(state.base_var());
  const auto& atoms = state.atoms();
  std::normal_distribution<double> normal(state.base_mean(), base_sd);
  std::uniform_int_distribution<std::size_t> pick(0, atoms.empty() ? 0 : atoms.size() - 1);
  for (std::size_t i = 0; i < count; ++i) {
    if (atoms.empty() || uniform01(rng) < base_weight)
      draws.push_back(normal(rng));
    else
      draws.push_back(atoms[pick(rng)]);
  }
  return draws;
}

MixtureMeasure::MixtureMeasure(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw InputError("mixture: needs at least one component");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight >= 0.0 && c.weight <= 1.0)) throw InputError("mixture: weights must lie in [0, 1]");
    if (!(c.var > 0.0) || !std::isfinite(c.var) || !std::isfinite(c.mean))
      throw InputError("mixture: components need finite means and positive variances");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InputError("mixture: weights must sum to one");
}

double MixtureMeasure::mean() const {
  double m = 0.0;
  for (const auto& c : components_) m += c.weight * c.mean;
  return m;
}

double MixtureMeasure::variance() const {
  const double m = mean();
  double second = 0.0;
  for (const auto& c : components_) second += c.weight * (c.var + (c.mean - m) * (c.mean - m));
  return second;
}

double mixture_draw(const MixtureMeasure& measure, Rng& rng) {
  const auto& comps = measure.components();
  const double u = uniform01(rng);
  std::size_t k = 0;
  double cumulative = comps[0].weight;
  while (u >= cumulative && k + 1 < comps.size()) cumulative += comps[++k].weight;
  return std::normal_distribution<double>(comps[k].mean, std::sqrt(comps[k].var))(rng);
}

}  // namespace nabc
