#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nabc/errors.hpp"
#include "nabc/quadrature.hpp"

using namespace nabc;

TEST_CASE("weights and moments") {
  for (int n : {1, 2, 5, 16, 32, 64}) {
    const GaussHermiteRule rule = gauss_hermite(n);
    CHECK(std::abs(gauss_hermite_expectation([](double) { return 1.0; }, 0.0, 1.0, rule) - 1.0) <= 1e-14);
  }
  const GaussHermiteRule rule = gauss_hermite(16);
  CHECK(std::abs(gauss_hermite_expectation([](double z) { return z; }, 0.3, 2.0, rule) - 0.3) <= 1e-12);
  CHECK(gauss_hermite_expectation([](double z) { return z * z; }, 0.3, 2.0, rule) == doctest::Approx(2.09));
}

TEST_CASE("lognormal mean") {
  const GaussHermiteRule rule = gauss_hermite(32);
  const double v = gauss_hermite_expectation([](double z) { return std::exp(z); }, 0.0, 0.25, rule);
  CHECK(std::abs(v - std::exp(0.125)) <= 1e-10);
  CHECK(v == doctest::Approx(1.13315).epsilon(1e-5));
}

TEST_CASE("rule structure") {
  const GaussHermiteRule rule = gauss_hermite(10);
  for (int i = 0; i < 10; ++i) {
    CHECK(rule.nodes(i) == doctest::Approx(-rule.nodes(9 - i)));
    CHECK(rule.weights(i) > 0.0);
  }
  CHECK(rule.weights.sum() == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
}

TEST_CASE("errors") {
  CHECK_THROWS(gauss_hermite(0));
  const GaussHermiteRule rule = gauss_hermite(4);
  CHECK_THROWS_AS(gauss_hermite_expectation([](double) { return NAN; }, 0.0, 1.0, rule), InputError);
  CHECK_THROWS(gauss_hermite_expectation([](double) { return 1.0; }, 0.0, 0.0, rule));
}
