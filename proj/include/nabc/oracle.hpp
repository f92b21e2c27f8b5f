#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nabc {

/// Small discrete-noise problem solved by exhaustive search. Log-returns take
/// the values `atoms`; their predictive probabilities follow a Polya urn with
/// initial `counts`, so an observed atom gains one unit of weight. This is the
/// posterior-mean recursion with a vanishing prior mass and the atoms as
/// initial observations.
struct OracleInstance {
  int horizon = 1;
  double rate = 0.0;
  double eta = 1.5;
  double initial_wealth = 1.0;
  std::vector<double> atoms;
  std::vector<double> counts;
  double resolution = 1e-3;
};

struct OracleResult {
  double control = 0.0;
  double value = 0.0;
  double resolution = 1e-3;
  std::vector<double> stage1_controls;  // optimal second control after each atom, T = 2 only
};

/// key=value text with keys T, r, eta, y0, atoms, counts (optional, default
/// all ones) and resolution (optional).
OracleInstance parse_oracle_instance(std::string_view text);

/// Nested grid search over controls k * resolution in [0, 1]. Throws
/// InputError when T > 2, there are more than 8 atoms or the grid is finer
/// than 1e-4.
OracleResult solve_oracle(const OracleInstance& instance);

std::string format_oracle(const OracleResult& result);

}  // namespace nabc
