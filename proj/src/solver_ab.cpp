#include "nabc/solver_ab.hpp"

#include <cmath>

#include "nabc/baselines.hpp"

namespace nabc {

DesignMesh generate_mesh(std::span<const AugmentedState> initial, const Eigen::MatrixXd& controls,
                         const Eigen::MatrixXd& noise, double rate, int moments) {
  const auto paths = static_cast<Eigen::Index>(initial.size());
  if (controls.rows() != paths || noise.rows() != paths || controls.cols() != noise.cols())
    throw InputError("generate_mesh: controls and noise must be N x T");
  const auto horizon = static_cast<int>(controls.cols());
  DesignMesh mesh;
  mesh.controls = controls;
  mesh.noise = noise;
  mesh.sites.resize(horizon + 1);
  mesh.reduced.resize(horizon + 1);
  mesh.sites[0].assign(initial.begin(), initial.end());
  for (int t = 0; t < horizon; ++t) {
    mesh.sites[t + 1].reserve(paths);
    for (Eigen::Index i = 0; i < paths; ++i)
      mesh.sites[t + 1].push_back(transition(t, mesh.sites[t][i], controls(i, t), noise(i, t), rate));
  }
  for (int t = 0; t <= horizon; ++t) {
    mesh.reduced[t].resize(paths, 1 + moments);
    for (Eigen::Index i = 0; i < paths; ++i) mesh.reduced[t].row(i) = reduce_state(mesh.sites[t][i], moments);
  }
  return mesh;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> draw_design(const ExperimentConfig& config, Rng& rng) {
  const int n = config.design_paths;
  const int horizon = config.horizon;
  Eigen::MatrixXd controls(n, horizon);
  Eigen::MatrixXd noise(n, horizon);
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < horizon; ++t) {
      controls(i, t) = uniform01(rng);
      noise(i, t) = mixture_draw(config.sampling_measure, rng);
    }
  }
  return {std::move(controls), std::move(noise)};
}

DesignMesh generate_mesh(const ExperimentConfig& config, const AugmentedState& initial, Rng& rng) {
  const auto [controls, noise] = draw_design(config, rng);
  const std::vector<AugmentedState> starts(config.design_paths, initial);
  return generate_mesh(starts, controls, noise, config.rate, config.moments);
}

SiteEstimator::SiteEstimator(const AugmentedState& site, std::span<const double> draws,
                             NextValue next, double rate, double eta, int moments)
    : wealth_(site.wealth), rate_(rate), eta_(eta), next_(next) {
  const auto count = static_cast<Eigen::Index>(draws.size());
  if (count == 0) throw InputError("SiteEstimator: need at least one draw");
  const Eigen::Map<const Eigen::ArrayXd> z(draws.data(), count);
  growth_ = z.exp();
  if (next_.terminal()) return;

  // Moments of the updated posterior do not depend on the control.
  const MomentVector m = posterior_moments(site.posterior, moments);
  const double mass = site.posterior.total_mass();
  queries_.resize(count, 1 + moments);
  queries_.col(0).setZero();
  Eigen::ArrayXd power = Eigen::ArrayXd::Ones(count);
  for (int k = 0; k < moments; ++k) {
    power *= z;
    queries_.col(1 + k) = ((mass * m(k) + power) / (mass + 1.0)).matrix();
  }
  slice_.emplace(*next_.surrogate, queries_, 0);
}

double SiteEstimator::operator()(double control) const {
  const Eigen::ArrayXd wealth = wealth_ * ((1.0 - control) * (1.0 + rate_) + control * growth_);
  if (next_.terminal()) {
    const double a = 1.0 - eta_;
    return ((a * wealth.log()).expm1() / a).mean();
  }
  return slice_->predict(wealth.matrix()).mean();
}

double stage_value_estimate(const AugmentedState& site, double control, NextValue next,
                            const ExperimentConfig& config, Rng& rng) {
  const auto draws = sample_posterior_mean(site.posterior, static_cast<std::size_t>(config.inner_samples), rng);
  return SiteEstimator(site, draws, next, config.rate, config.eta, config.moments)(control);
}

Policy backward_induction(const ExperimentConfig& config, const DesignMesh& mesh,
                          const AugmentedState& initial, int threads) {
  if (mesh.horizon() != config.horizon) throw InputError("backward_induction: mesh horizon differs from config");
  PolicyContext context;
  context.horizon = config.horizon;
  context.rate = config.rate;
  context.eta = config.eta;
  context.initial_wealth = initial.wealth;
  context.moments = config.moments;
  context.prior_mass = initial.posterior.prior_mass();
  context.mu0 = initial.posterior.base_mean();
  context.sigma0_sq = initial.posterior.base_var();
  context.history_size = config.history_size;

  const auto samples = static_cast<std::size_t>(config.inner_samples);
  auto solve_at = [&](const AugmentedState& site, Rng rng, NextValue next) {
    const auto draws = sample_posterior_mean(site.posterior, samples, rng);
    const SiteEstimator estimator(site, draws, next, config.rate, config.eta, config.moments);
    return optimize_control(estimator);
  };
  return run_induction(
      Method::ab, context, mesh.reduced, config, threads,
      [&](int t, std::size_t i, NextValue next) {
        return solve_at(mesh.sites[t][i], substream(config.seeds.inner, {static_cast<std::uint64_t>(t), i}), next);
      },
      [&](NextValue next) { return solve_at(initial, substream(config.seeds.inner, {0, 0}), next); });
}

AugmentedState initial_state(const ExperimentConfig& config, double prior_mass) {
  const AdaptiveEstimate est = resolve_estimates(config);
  return {config.initial_wealth, PosteriorState(prior_mass, est.mean, est.var)};
}

Policy solve_adaptive_bayes(const ExperimentConfig& config, double prior_mass, int threads) {
  config.validate();
  const AugmentedState x0 = initial_state(config, prior_mass);
  Rng rng(config.seeds.design);
  const DesignMesh mesh = generate_mesh(config, x0, rng);
  return backward_induction(config, mesh, x0, threads);
}

}  // namespace nabc
