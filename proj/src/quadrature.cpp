#include "nabc/quadrature.hpp"

#include <Eigen/Eigenvalues>

namespace nabc {

namespace {

// Orthonormal Hermite recurrence at x; returns (p_n(x), p_{n-1}(x)).
std::pair<double, double> hermite_pair(int n, double x) {
  double p1 = std::pow(std::numbers::pi, -0.25);
  double p2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double p3 = p2;
    p2 = p1;
    p1 = x * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
  }
  return {p1, p2};
}

}  // namespace

GaussHermiteRule gauss_hermite(int nodes) {
  if (nodes < 1) throw InputError("gauss_hermite: need at least one node");
  // Golub-Welsch for starting values, then Newton on the recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(nodes, nodes);
  for (int k = 1; k < nodes; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(k / 2.0);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);

  GaussHermiteRule rule{Eigen::VectorXd(nodes), Eigen::VectorXd(nodes)};
  for (int i = 0; i < nodes; ++i) {
    double x = eig.eigenvalues()(i);
    double derivative = 0.0;
    for (int iter = 0; iter < 20; ++iter) {
      const auto [pn, pn1] = hermite_pair(nodes, x);
      derivative = std::sqrt(2.0 * nodes) * pn1;
      const double dx = pn / derivative;
      x -= dx;
      if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    const auto [pn, pn1] = hermite_pair(nodes, x);
    derivative = std::sqrt(2.0 * nodes) * pn1;
    rule.nodes(i) = x;
    rule.weights(i) = 2.0 / (derivative * derivative);
  }
  return rule;
}

double gauss_hermite_expectation(const std::function<double(double)>& integrand, double mean,
                                 double var, int nodes) {
  return gauss_hermite_expectation(integrand, mean, var, gauss_hermite(nodes));
}

}  // namespace nabc
