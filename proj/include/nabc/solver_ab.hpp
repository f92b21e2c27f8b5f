#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "nabc/config.hpp"
#include "nabc/dynamics.hpp"
#include "nabc/induction.hpp"
#include "nabc/policy.hpp"
#include "nabc/random.hpp"

namespace nabc {

/// Control-randomized design sites for the adaptive-Bayesian recursion.
struct DesignMesh {
  std::vector<std::vector<AugmentedState>> sites;  // sites[t][i], t = 0..T
  std::vector<Eigen::MatrixXd> reduced;            // reduced[t].row(i) = reduce_state(sites[t][i])
  Eigen::MatrixXd controls;                        // N x T, randomized controls
  Eigen::MatrixXd noise;                           // N x T, design log-returns

  int paths() const { return static_cast<int>(controls.rows()); }
  int horizon() const { return static_cast<int>(controls.cols()); }
};

/// N x T uniform controls and N x T sampling-measure draws, path by path.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> draw_design(const ExperimentConfig& config, Rng& rng);

/// Rolls each path forward from its own initial state with the given
/// controls and noise.
DesignMesh generate_mesh(std::span<const AugmentedState> initial, const Eigen::MatrixXd& controls,
                         const Eigen::MatrixXd& noise, double rate, int moments);

/// Uniform controls on [0, 1] and noise from the configured sampling measure;
/// every path starts at `initial`.
DesignMesh generate_mesh(const ExperimentConfig& config, const AugmentedState& initial, Rng& rng);

/// Monte Carlo estimate of E_P[next(G(t, site, u, Z))] with the draws fixed
/// up front, so the same draws serve every candidate control (common random
/// numbers).
class SiteEstimator {
 public:
  SiteEstimator(const AugmentedState& site, std::span<const double> draws, NextValue next,
                double rate, double eta, int moments);

  double operator()(double control) const;

 private:
  double wealth_;
  double rate_;
  double eta_;
  NextValue next_;
  Eigen::ArrayXd growth_;
  Eigen::MatrixXd queries_;
  std::optional<gp::SliceEvaluator> slice_;
};

/// Draws L samples from the site's posterior mean and averages the next
/// stage value over the transitioned states.
double stage_value_estimate(const AugmentedState& site, double control, NextValue next,
                            const ExperimentConfig& config, Rng& rng);

/// Fits value and control surrogates backward in time and optimizes the root
/// decision at `initial`. Per-site random streams are derived from
/// config.seeds.inner so the result does not depend on `threads`.
Policy backward_induction(const ExperimentConfig& config, const DesignMesh& mesh,
                          const AugmentedState& initial, int threads = 1);

/// (y0, N(mu0, sigma0^2) prior with mass c0) from the configured or simulated estimates.
AugmentedState initial_state(const ExperimentConfig& config, double prior_mass);

/// Mesh generation plus backward induction for one prior mass.
Policy solve_adaptive_bayes(const ExperimentConfig& config, double prior_mass, int threads = 1);

}  // namespace nabc
