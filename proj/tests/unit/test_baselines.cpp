#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "nabc/baselines.hpp"
#include "nabc/errors.hpp"
#include "nabc/random.hpp"

using namespace nabc;

namespace {

AdaptiveEstimate batch_mle(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, ss / static_cast<double>(xs.size()), static_cast<int>(xs.size())};
}

ExperimentConfig small_case(const char* id) {
  ExperimentConfig c = preset(id, Scale::ci);
  c.horizon = 3;
  c.design_paths = 40;
  c.inner_samples = 50;
  c.gp.starts = 2;
  c.gp.max_evaluations = 60;
  return c;
}

}  // namespace

TEST_CASE("initial_estimates") {
  const std::vector<double> ones{1.0, 1.0, 1.0};
  CHECK(initial_estimates(ones) == AdaptiveEstimate{1.0, 0.0, 3});
  const std::vector<double> two{0.0, 2.0};
  CHECK(initial_estimates(two) == AdaptiveEstimate{1.0, 1.0, 2});
  CHECK_THROWS_AS(initial_estimates(std::vector<double>{1.0}), InputError);

  Rng rng(1);
  std::normal_distribution<double> normal(0.001, 0.06);
  std::vector<double> draws(1'000'000);
  for (double& d : draws) d = normal(rng);
  CHECK(std::abs(initial_estimates(draws).mean - 0.001) < 4.0 * 0.06 / 1e3);
}

TEST_CASE("adaptive_update") {
  CHECK(adaptive_update({0.0, 0.0, 1}, 2.0) == AdaptiveEstimate{1.0, 1.0, 2});
  const AdaptiveEstimate e{0.3, 0.5, 7};
  const AdaptiveEstimate same = adaptive_update(e, 0.3);
  CHECK(same.mean == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(same.var == doctest::Approx(0.5 * 7.0 / 8.0).epsilon(1e-15));
  CHECK(same.count == 8);
}

TEST_CASE("fold equals batch maximum likelihood") {
  Rng rng(2);
  std::normal_distribution<double> normal(0.002, 0.07);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> xs(2 + static_cast<std::size_t>(uniform01(rng) * 100));
    for (double& x : xs) x = normal(rng);
    const std::size_t prefix = 2 + static_cast<std::size_t>(uniform01(rng) * (xs.size() - 2));
    AdaptiveEstimate e = initial_estimates(std::span<const double>(xs.data(), prefix));
    for (std::size_t i = prefix; i < xs.size(); ++i) {
      e = adaptive_update(e, xs[i]);
      const AdaptiveEstimate b = batch_mle(std::vector<double>(xs.begin(), xs.begin() + static_cast<long>(i) + 1));
      REQUIRE(std::abs(e.mean - b.mean) <= 1e-10);
      REQUIRE(std::abs(e.var - b.var) <= 1e-10);
      REQUIRE(e.count == b.count);
    }
  }
}

TEST_CASE("confidence region") {
  CHECK(chi_square2_quantile(0.8) == doctest::Approx(3.21888).epsilon(1e-5));
  const ConfidenceRegion r = confidence_region({0.0, 1.0, 100}, 0.8);
  CHECK(r.mean_halfwidth() == doctest::Approx(0.17941).epsilon(1e-4));
  CHECK(r.contains(0.0, 1.0));
  CHECK(r.statistic(0.0, 1.0) == 0.0);

  const ConfidenceRegion tiny = confidence_region({0.0, 1.0, 100}, 1e-12);
  CHECK(tiny.mean_halfwidth() < 1e-6);
  CHECK(tiny.var_halfwidth() < 1e-6);

  CHECK_THROWS_AS(confidence_region({0.0, 0.0, 100}, 0.8), InputError);
  CHECK_THROWS_AS(confidence_region({0.0, 1.0, 100}, 1.0), InputError);
}

TEST_CASE("region nesting and discretization") {
  const AdaptiveEstimate center{4.615e-3, 5.609e-2 * 5.609e-2, 100};
  const ConfidenceRegion inner(center, 0.6);
  const ConfidenceRegion outer(center, 0.8);
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double mu = center.mean + 0.05 * (2.0 * uniform01(rng) - 1.0);
    const double v = center.var * (0.2 + 1.6 * uniform01(rng));
    if (inner.contains(mu, v)) REQUIRE(outer.contains(mu, v));
  }
  const auto points = outer.discretize(64, 2);
  CHECK(points.size() == 129);
  for (const auto& [mu, v] : points) {
    CHECK(v > 0.0);
    CHECK(outer.statistic(mu, v) <= outer.radius_sq() * (1.0 + 1e-12));
  }
  CHECK(outer.mean_halfwidth() == doctest::Approx(0.01006).epsilon(1e-3));
}

TEST_CASE("discretization clips variance when the ellipse crosses zero") {
  const ConfidenceRegion wide({0.0, 1.0, 2}, 0.99);
  for (const auto& p : wide.discretize(64, 2)) CHECK(p.second > 0.0);
}

TEST_CASE("resolve_estimates") {
  ExperimentConfig c = preset("1-1");
  const AdaptiveEstimate given = resolve_estimates(c);
  CHECK(given.mean == 4.615e-3);
  CHECK(given.var == doctest::Approx(5.609e-2 * 5.609e-2));
  CHECK(given.count == 100);
  c.mu0_hat.reset();
  c.sigma0_sq_hat.reset();
  const AdaptiveEstimate simulated = resolve_estimates(c);
  CHECK(simulated.count == 100);
  CHECK(simulated == resolve_estimates(c));
  CHECK(std::abs(simulated.mean - c.sampling_measure.mean()) < 5.0 * std::sqrt(c.sampling_measure.variance() / 100.0));
}

TEST_CASE("strong robust keeps money in the bank on case 1-1") {
  const ExperimentConfig c = small_case("1-1");
  const Policy p = solve_strong_robust(c);
  CHECK(p.method == Method::sr);
  CHECK(p.stages.size() == 2);
  CHECK(p.root.control <= 0.05);
  for (const auto& stage : p.stages) CHECK(stage.value.input_dim() == 1);
}

TEST_CASE("strong robust is dominated by the adaptive value, and coincides when the region collapses") {
  ExperimentConfig c = small_case("1-1");
  c.horizon = 1;
  const Policy ad = solve_adaptive(c);
  const Policy sr = solve_strong_robust(c);
  CHECK(sr.root.value <= ad.root.value + 1e-12);

  c.confidence_level = 1e-14;
  const Policy collapsed = solve_strong_robust(c);
  CHECK(collapsed.root.control == doctest::Approx(ad.root.control).epsilon(1e-3));
  CHECK(collapsed.root.value == doctest::Approx(ad.root.value).epsilon(1e-9));
}

TEST_CASE("adaptive policy under a point belief below the bank rate") {
  ExperimentConfig c = small_case("1-1");
  c.horizon = 1;
  c.mu0_hat = 0.0;
  c.sigma0_sq_hat = 1e-14;
  CHECK(solve_adaptive(c).root.control == 0.0);
}

TEST_CASE("adaptive policy shape") {
  const Policy p = solve_adaptive(small_case("2-1"));
  CHECK(p.method == Method::ad);
  CHECK(p.stages.size() == 2);
  CHECK(p.stages[0].value.input_dim() == 3);
  CHECK(p.root.value <= 1.0 / (p.context.eta - 1.0));
  for (const auto& stage : p.stages) CHECK(stage.value.raw_targets().maxCoeff() <= 1.0 / (p.context.eta - 1.0));
}
