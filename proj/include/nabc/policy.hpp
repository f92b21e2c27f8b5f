#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "nabc/gp.hpp"

namespace nabc {

enum class Method { ab, sr, ad };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

/// Problem constants a policy needs to be rolled forward on its own.
struct PolicyContext {
  int horizon = 1;
  double rate = 0.0;
  double eta = 1.5;
  double initial_wealth = 100.0;
  int moments = 4;
  double prior_mass = 1.0;
  double mu0 = 0.0;
  double sigma0_sq = 1.0;
  int history_size = 1;

  friend bool operator==(const PolicyContext&, const PolicyContext&) = default;
};

struct StageModel {
  gp::Surrogate value;
  gp::Surrogate control;
};

struct RootDecision {
  double control = 0.0;
  double value = 0.0;
};

/// Per-stage value and control surrogates for t = 1..T-1 plus the decision at
/// the known initial state.
struct Policy {
  Method method = Method::ab;
  PolicyContext context;
  std::vector<StageModel> stages;  // stages[t - 1] serves stage t
  RootDecision root;

  /// Control at `stage` for a state in the method's reduced coordinates,
  /// clamped to [0, 1]. Stage 0 returns the root decision.
  double control(int stage, const Eigen::Ref<const Eigen::VectorXd>& reduced) const;
};

}  // namespace nabc
