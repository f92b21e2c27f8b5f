#include "nabc/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nabc/baselines.hpp"
#include "nabc/dynamics.hpp"
#include "nabc/errors.hpp"
#include "nabc/parallel.hpp"
#include "nabc/random.hpp"

namespace nabc {

Eigen::MatrixXd draw_noise(const MixtureMeasure& measure, int paths, int horizon, std::uint64_t seed) {
  if (paths < 1 || horizon < 1) throw InputError("draw_noise: paths and horizon must be positive");
  Rng rng(seed);
  Eigen::MatrixXd noise(paths, horizon);
  for (int i = 0; i < paths; ++i)
    for (int t = 0; t < horizon; ++t) noise(i, t) = mixture_draw(measure, rng);
  return noise;
}

EvalReport simulate_out_of_sample(const Policy& policy, const Eigen::MatrixXd& noise, int threads) {
  const PolicyContext& ctx = policy.context;
  const int horizon = ctx.horizon;
  if (noise.cols() != horizon)
    throw InputError("simulate_out_of_sample: noise has " + std::to_string(noise.cols()) +
                     " stages, policy expects " + std::to_string(horizon));
  if (static_cast<int>(policy.stages.size()) != horizon - 1)
    throw InputError("simulate_out_of_sample: policy has " + std::to_string(policy.stages.size()) +
                     " surrogate stages, expected " + std::to_string(horizon - 1));

  const Eigen::Index paths = noise.rows();
  EvalReport report;
  report.method = policy.method;
  if (policy.method == Method::ab) report.prior_mass = ctx.prior_mass;
  report.terminal_utilities.resize(paths);
  report.strategy_paths.resize(paths, horizon);
  report.wealth_paths.resize(paths, horizon + 1);
  if (policy.method == Method::ad) {
    report.mean_paths.resize(paths, horizon + 1);
    report.var_paths.resize(paths, horizon + 1);
  }

  parallel_for(static_cast<std::size_t>(paths), threads, [&](std::size_t index) {
    const auto i = static_cast<Eigen::Index>(index);
    double wealth = ctx.initial_wealth;
    std::optional<AugmentedState> bayes;
    if (policy.method == Method::ab)
      bayes = AugmentedState{wealth, PosteriorState(ctx.prior_mass, ctx.mu0, ctx.sigma0_sq, {})};
    AdaptiveEstimate est{ctx.mu0, ctx.sigma0_sq, ctx.history_size};

    report.wealth_paths(i, 0) = wealth;
    if (policy.method == Method::ad) {
      report.mean_paths(i, 0) = est.mean;
      report.var_paths(i, 0) = est.var;
    }
    for (int t = 0; t < horizon; ++t) {
      double u = 0.0;
      if (t == 0) {
        u = policy.control(0, Eigen::VectorXd());
      } else if (policy.method == Method::ab) {
        u = policy.control(t, reduce_state(*bayes, ctx.moments));
      } else if (policy.method == Method::ad) {
        u = policy.control(t, Eigen::Vector3d(wealth, est.mean, est.var));
      } else {
        u = policy.control(t, Eigen::VectorXd::Constant(1, wealth));
      }
      const double z = noise(i, t);
      if (bayes) {
        *bayes = transition(t, *bayes, u, z, ctx.rate);
        wealth = bayes->wealth;
      } else {
        wealth = wealth_step(wealth, u, ctx.rate, z);
      }
      if (policy.method == Method::ad) {
        est = adaptive_update(est, z);
        report.mean_paths(i, t + 1) = est.mean;
        report.var_paths(i, t + 1) = est.var;
      }
      report.strategy_paths(i, t) = u;
      report.wealth_paths(i, t + 1) = wealth;
    }
    report.terminal_utilities(i) = utility(wealth, ctx.eta);
  });

  if (paths >= 2) {
    report.stats = summarize(std::span<const double>(report.terminal_utilities.data(),
                                                     static_cast<std::size_t>(paths)));
  } else if (paths == 1) {
    const double v = report.terminal_utilities(0);
    report.stats = {v, 0.0, v, v, v, v};
  }
  return report;
}

double quantile(std::span<const double> samples, double p) {
  if (samples.empty()) throw InputError("quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("quantile: probability must lie in [0, 1]");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

SummaryStats summarize(std::span<const double> utilities) {
  if (utilities.size() < 2) throw InputError("summarize: need at least two samples");
  std::vector<double> sorted(utilities.begin(), utilities.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  // Sorted accumulation keeps the result independent of sample order.
  double mean = 0.0;
  for (double v : sorted) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : sorted) ss += (v - mean) * (v - mean);
  SummaryStats s;
  s.mean = mean;
  s.var = ss / (n - 1.0);
  s.q30 = quantile(sorted, 0.3);
  s.q90 = quantile(sorted, 0.9);
  s.max = sorted.back();
  s.min = sorted.front();
  return s;
}

}  // namespace nabc
