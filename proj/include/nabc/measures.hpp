#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "nabc/random.hpp"

namespace nabc {

/// Raw moments (m^1, ..., m^M) of a probability measure on the real line.
using MomentVector = Eigen::VectorXd;

/// Largest moment order with a closed form for the Gaussian base measure.
inline constexpr int kMaxMoments = 8;

/// Posterior mean of a Dirichlet process with a Gaussian base measure after
/// observing `atoms`:
///
///   (c0 * N(base_mean, base_var) + sum_s delta_{z_s}) / (c0 + t).
///
/// Atoms are kept verbatim and in observation order. The object is an
/// immutable value; updating returns a new state.
class PosteriorState {
 public:
  PosteriorState(double prior_mass, double base_mean, double base_var,
                 std::vector<double> atoms = {});

  double prior_mass() const { return prior_mass_; }
  double base_mean() const { return base_mean_; }
  double base_var() const { return base_var_; }
  const std::vector<double>& atoms() const { return atoms_; }
  std::size_t count() const { return atoms_.size(); }

  double base_weight() const { return prior_mass_ / total_mass(); }
  double atom_weight() const { return 1.0 / total_mass(); }
  double total_mass() const { return prior_mass_ + static_cast<double>(atoms_.size()); }

  friend bool operator==(const PosteriorState&, const PosteriorState&) = default;

 private:
  double prior_mass_;
  double base_mean_;
  double base_var_;
  std::vector<double> atoms_;
};

/// One observation step: ((c0 + t) P + delta_z) / (c0 + t + 1).
PosteriorState posterior_update(const PosteriorState& state, double z);

/// Closed-form raw moments of N(mean, var) up to order M (M <= kMaxMoments).
MomentVector gaussian_raw_moments(double mean, double var, int order);

/// m^k = (c0 m^k_{P0} + sum_s z_s^k) / (c0 + t), k = 1..M.
MomentVector posterior_moments(const PosteriorState& state, int order);

/// Draws from the posterior-mean mixture: the base Gaussian with probability
/// c0 / (c0 + t), otherwise a uniformly chosen atom.
std::vector<double> sample_posterior_mean(const PosteriorState& state, std::size_t count,
                                          Rng& rng);

struct MixtureComponent {
  double weight;
  double mean;
  double var;

  friend bool operator==(const MixtureComponent&, const MixtureComponent&) = default;
};

/// Finite Gaussian mixture used as the ground-truth sampling measure.
class MixtureMeasure {
 public:
  explicit MixtureMeasure(std::vector<MixtureComponent> components);

  const std::vector<MixtureComponent>& components() const { return components_; }
  double mean() const;
  double variance() const;

  friend bool operator==(const MixtureMeasure&, const MixtureMeasure&) = default;

 private:
  std::vector<MixtureComponent> components_;
};

double mixture_draw(const MixtureMeasure& measure, Rng& rng);

}  // namespace nabc
