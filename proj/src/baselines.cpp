#include "nabc/baselines.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>

#include "nabc/dynamics.hpp"
#include "nabc/errors.hpp"
#include "nabc/induction.hpp"
#include "nabc/quadrature.hpp"
#include "nabc/solver_ab.hpp"

namespace nabc {

AdaptiveEstimate initial_estimates(std::span<const double> observations) {
  if (observations.size() < 2) throw InputError("initial_estimates: need at least two observations");
  const auto n = static_cast<double>(observations.size());
  double mean = 0.0;
  for (double z : observations) mean += z;
  mean /= n;
  double ss = 0.0;
  for (double z : observations) ss += (z - mean) * (z - mean);
  return {mean, ss / n, static_cast<int>(observations.size())};
}

AdaptiveEstimate adaptive_update(const AdaptiveEstimate& estimate, double z) {
  const double n = estimate.count;
  const double d = estimate.mean - z;
  return {(n * estimate.mean + z) / (n + 1.0),
          (n * (n + 1.0) * estimate.var + n * d * d) / ((n + 1.0) * (n + 1.0)), estimate.count + 1};
}

ConfidenceRegion::ConfidenceRegion(const AdaptiveEstimate& center, double level)
    : center_(center), level_(level), radius_sq_(chi_square2_quantile(level)) {
  if (!(center.var > 0.0)) throw InputError("confidence_region: variance estimate must be positive");
  if (!(level > 0.0 && level < 1.0)) throw InputError("confidence_region: level must lie in (0, 1)");
  if (center.count < 1) throw InputError("confidence_region: count must be positive");
}

double ConfidenceRegion::statistic(double mean, double var) const {
  const double n = center_.count;
  const double s2 = center_.var;
  const double dm = mean - center_.mean;
  const double dv = var - s2;
  return n * dm * dm / s2 + n * dv * dv / (2.0 * s2 * s2);
}

double ConfidenceRegion::mean_halfwidth() const {
  return std::sqrt(radius_sq_ * center_.var / center_.count);
}

double ConfidenceRegion::var_halfwidth() const {
  return std::sqrt(2.0 * radius_sq_ * center_.var * center_.var / center_.count);
}

std::vector<std::pair<double, double>> ConfidenceRegion::discretize(int boundary_points, int rings) const {
  std::vector<std::pair<double, double>> points;
  const double floor_var = 1e-6 * center_.var;
  auto add_ring = [&](double fraction, int count) {
    for (int k = 0; k < count; ++k) {
      const double angle = 2.0 * std::numbers::pi * k / count;
      points.emplace_back(center_.mean + fraction * mean_halfwidth() * std::cos(angle),
                          std::max(floor_var, center_.var + fraction * var_halfwidth() * std::sin(angle)));
    }
  };
  add_ring(1.0, boundary_points);
  points.emplace_back(center_.mean, center_.var);
  const int per_ring = rings > 0 ? std::max(1, boundary_points / rings) : 0;
  for (int r = 1; r <= rings; ++r) add_ring(static_cast<double>(r) / (rings + 1), per_ring);
  return points;
}

ConfidenceRegion confidence_region(const AdaptiveEstimate& estimate, double level) {
  return ConfidenceRegion(estimate, level);
}

AdaptiveEstimate resolve_estimates(const ExperimentConfig& config) {
  if (config.mu0_hat && config.sigma0_sq_hat)
    return {*config.mu0_hat, *config.sigma0_sq_hat, config.history_size};
  Rng rng(config.seeds.history);
  std::vector<double> history(static_cast<std::size_t>(config.history_size));
  for (double& z : history) z = mixture_draw(config.sampling_measure, rng);
  return initial_estimates(history);
}

namespace {

PolicyContext baseline_context(const ExperimentConfig& config, const AdaptiveEstimate& est) {
  PolicyContext context;
  context.horizon = config.horizon;
  context.rate = config.rate;
  context.eta = config.eta;
  context.initial_wealth = config.initial_wealth;
  context.moments = config.moments;
  context.prior_mass = 0.0;
  context.mu0 = est.mean;
  context.sigma0_sq = est.var;
  context.history_size = est.count;
  return context;
}

Eigen::ArrayXd next_values(const Eigen::ArrayXd& wealth, NextValue next,
                           const std::optional<gp::SliceEvaluator>& slice, double eta) {
  if (next.terminal()) {
    const double a = 1.0 - eta;
    return (a * wealth.log()).expm1() / a;
  }
  return slice->predict(wealth.matrix()).array();
}

// Expectations for every candidate parameter pair share one flattened array
// of gross returns laid out candidate-major within each node. The wealth-only
// continuation value is read from a per-stage table of the surrogate.
class RobustEstimator {
 public:
  RobustEstimator(double wealth, const Eigen::ArrayXd& growth, const Eigen::VectorXd& node_weights,
                  Eigen::Index candidates, const gp::Tabulated1D* table, double rate, double eta)
      : wealth_(wealth), growth_(growth), node_weights_(node_weights), candidates_(candidates),
        table_(table), rate_(rate), eta_(eta) {}

  double operator()(double control) const {
    const Eigen::ArrayXd wealth = wealth_ * ((1.0 - control) * (1.0 + rate_) + control * growth_);
    Eigen::ArrayXd values;
    if (table_ == nullptr) {
      const double a = 1.0 - eta_;
      values = (a * wealth.log()).expm1() / a;
    } else {
      values = wealth.unaryExpr([this](double y) { return (*table_)(y); });
    }
    const Eigen::Map<const Eigen::MatrixXd> grid(values.data(), candidates_, node_weights_.size());
    return (grid * node_weights_).minCoeff();
  }

 private:
  double wealth_;
  const Eigen::ArrayXd& growth_;
  const Eigen::VectorXd& node_weights_;
  Eigen::Index candidates_;
  const gp::Tabulated1D* table_;
  double rate_;
  double eta_;
};

struct NodeSet {
  Eigen::ArrayXd z;
  Eigen::VectorXd weights;
};

NodeSet gaussian_nodes(double mean, double var, const GaussHermiteRule& rule) {
  if (!(var > 0.0)) return {Eigen::ArrayXd::Constant(1, mean), Eigen::VectorXd::Ones(1)};
  return {mean + std::sqrt(2.0 * var) * rule.nodes.array(), rule.weights / std::sqrt(std::numbers::pi)};
}

class AdaptiveEstimator {
 public:
  AdaptiveEstimator(double wealth, const AdaptiveEstimate& est, const GaussHermiteRule& rule,
                    NextValue next, double rate, double eta)
      : wealth_(wealth), next_(next), rate_(rate), eta_(eta) {
    NodeSet nodes = gaussian_nodes(est.mean, est.var, rule);
    weights_ = std::move(nodes.weights);
    growth_ = nodes.z.exp();
    if (next_.terminal()) return;
    Eigen::MatrixXd queries(nodes.z.size(), 3);
    for (Eigen::Index g = 0; g < nodes.z.size(); ++g) {
      const AdaptiveEstimate updated = adaptive_update(est, nodes.z(g));
      queries.row(g) << 0.0, updated.mean, updated.var;
    }
    slice_.emplace(*next_.surrogate, queries, 0);
  }

  double operator()(double control) const {
    const Eigen::ArrayXd wealth = wealth_ * ((1.0 - control) * (1.0 + rate_) + control * growth_);
    return next_values(wealth, next_, slice_, eta_).matrix().dot(weights_);
  }

 private:
  double wealth_;
  NextValue next_;
  double rate_;
  double eta_;
  Eigen::ArrayXd growth_;
  Eigen::VectorXd weights_;
  std::optional<gp::SliceEvaluator> slice_;
};

}  // namespace

Policy solve_strong_robust(const ExperimentConfig& config, int threads) {
  config.validate();
  const AdaptiveEstimate est = resolve_estimates(config);
  const ConfidenceRegion region(est, config.confidence_level);
  const auto candidates = region.discretize(config.region_boundary_points, config.region_rings);
  const GaussHermiteRule rule = gauss_hermite(config.quadrature_nodes);

  const auto c_count = static_cast<Eigen::Index>(candidates.size());
  const Eigen::Index g_count = rule.nodes.size();
  Eigen::ArrayXd growth(c_count * g_count);
  for (Eigen::Index g = 0; g < g_count; ++g)
    for (Eigen::Index c = 0; c < c_count; ++c) {
      const auto [mu, var] = candidates[static_cast<std::size_t>(c)];
      growth(c + c_count * g) = std::exp(mu + std::sqrt(2.0 * var) * rule.nodes(g));
    }
  const Eigen::VectorXd node_weights = rule.weights / std::sqrt(std::numbers::pi);

  Rng rng(config.seeds.design);
  const auto [controls, noise] = draw_design(config, rng);
  const int n = config.design_paths;
  std::vector<Eigen::MatrixXd> reduced(config.horizon + 1, Eigen::MatrixXd(n, 1));
  reduced[0].setConstant(config.initial_wealth);
  for (int t = 0; t < config.horizon; ++t)
    for (int i = 0; i < n; ++i)
      reduced[t + 1](i, 0) = wealth_step(reduced[t](i, 0), controls(i, t), config.rate, noise(i, t));

  // Tables are built once per stage by whichever worker gets there first;
  // their content does not depend on the thread count.
  const double low_growth = std::min(1.0 + config.rate, growth.minCoeff());
  const double high_growth = std::max(1.0 + config.rate, growth.maxCoeff());
  std::vector<std::unique_ptr<gp::Tabulated1D>> tables(static_cast<std::size_t>(config.horizon));
  std::vector<std::once_flag> built(static_cast<std::size_t>(config.horizon));
  auto table_for = [&](int t, NextValue next) -> const gp::Tabulated1D* {
    if (next.terminal()) return nullptr;
    const auto k = static_cast<std::size_t>(t);
    std::call_once(built[k], [&] {
      const double lo = t == 0 ? config.initial_wealth : reduced[t].col(0).minCoeff();
      const double hi = t == 0 ? config.initial_wealth : reduced[t].col(0).maxCoeff();
      tables[k] = std::make_unique<gp::Tabulated1D>(*next.surrogate, lo * low_growth, hi * high_growth);
    });
    return tables[k].get();
  };
  auto solve_at = [&](int t, double wealth, NextValue next) {
    return optimize_control(
        RobustEstimator(wealth, growth, node_weights, c_count, table_for(t, next), config.rate, config.eta));
  };
  return run_induction(
      Method::sr, baseline_context(config, est), reduced, config, threads,
      [&](int t, std::size_t i, NextValue next) {
        return solve_at(t, reduced[t](static_cast<Eigen::Index>(i), 0), next);
      },
      [&](NextValue next) { return solve_at(0, config.initial_wealth, next); });
}

Policy solve_adaptive(const ExperimentConfig& config, int threads) {
  config.validate();
  const AdaptiveEstimate est0 = resolve_estimates(config);
  const GaussHermiteRule rule = gauss_hermite(config.quadrature_nodes);

  Rng rng(config.seeds.design);
  const auto [controls, noise] = draw_design(config, rng);
  const int n = config.design_paths;
  std::vector<std::vector<AdaptiveEstimate>> estimates(config.horizon + 1, std::vector<AdaptiveEstimate>(n, est0));
  std::vector<Eigen::MatrixXd> reduced(config.horizon + 1, Eigen::MatrixXd(n, 3));
  for (int i = 0; i < n; ++i) reduced[0].row(i) << config.initial_wealth, est0.mean, est0.var;
  for (int t = 0; t < config.horizon; ++t)
    for (int i = 0; i < n; ++i) {
      const double z = noise(i, t);
      estimates[t + 1][i] = adaptive_update(estimates[t][i], z);
      reduced[t + 1].row(i) << wealth_step(reduced[t](i, 0), controls(i, t), config.rate, z),
          estimates[t + 1][i].mean, estimates[t + 1][i].var;
    }

  auto solve_at = [&](double wealth, const AdaptiveEstimate& est, NextValue next) {
    return optimize_control(AdaptiveEstimator(wealth, est, rule, next, config.rate, config.eta));
  };
  return run_induction(
      Method::ad, baseline_context(config, est0), reduced, config, threads,
      [&](int t, std::size_t i, NextValue next) {
        return solve_at(reduced[t](static_cast<Eigen::Index>(i), 0), estimates[t][i], next);
      },
      [&](NextValue next) { return solve_at(config.initial_wealth, est0, next); });
}

}  // namespace nabc
