#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nabc/config.hpp"
#include "nabc/errors.hpp"
#include "nabc/optimize.hpp"
#include "nabc/parallel.hpp"
#include "nabc/policy.hpp"
#include "nabc/random.hpp"

namespace nabc {

/// The value object of the following stage: the terminal utility when no
/// surrogate is attached, otherwise the fitted value surrogate.
struct NextValue {
  const gp::Surrogate* surrogate = nullptr;
  bool terminal() const { return surrogate == nullptr; }
};

/// Shared backward recursion used by every method. `reduced[t]` holds the
/// N design sites of stage t (one row each). `solve_site(t, i, next)` returns
/// the optimal control and value at site i of stage t; `solve_root(next)` does
/// the same at the known initial state. Surrogates are fitted for stages
/// T-1 down to 1.
template <typename SiteSolver, typename RootSolver>
Policy run_induction(Method method, const PolicyContext& context,
                     const std::vector<Eigen::MatrixXd>& reduced, const ExperimentConfig& config,
                     int threads, SiteSolver&& solve_site, RootSolver&& solve_root) {
  const int horizon = context.horizon;
  Policy policy;
  policy.method = method;
  policy.context = context;
  policy.stages.resize(horizon > 1 ? horizon - 1 : 0);

  gp::FitOptions fit_options = config.gp;
  fit_options.threads = threads;

  NextValue next;
  for (int t = horizon - 1; t >= 1; --t) {
    const Eigen::MatrixXd& sites = reduced.at(t);
    const auto n = static_cast<std::size_t>(sites.rows());
    Eigen::VectorXd values(sites.rows());
    Eigen::VectorXd controls(sites.rows());
    parallel_for(n, threads, [&](std::size_t i) {
      const ControlChoice choice = solve_site(t, i, next);
      values(static_cast<Eigen::Index>(i)) = choice.value;
      controls(static_cast<Eigen::Index>(i)) = choice.control;
    });
    if (!values.allFinite())
      throw SolverError("stage " + std::to_string(t) + ": non-finite stage values");
    try {
      StageModel& stage = policy.stages[t - 1];
      stage.value = gp::fit(sites, values, derive_seed(config.seeds.inner, {static_cast<std::uint64_t>(t), 0x7661ULL}),
                            fit_options);
      stage.control = gp::fit(sites, controls, derive_seed(config.seeds.inner, {static_cast<std::uint64_t>(t), 0x6374ULL}),
                              fit_options);
      next.surrogate = &stage.value;
    } catch (const std::exception& e) {
      throw SolverError("stage " + std::to_string(t) + ": surrogate fit failed: " + e.what());
    }
  }
  const ControlChoice root = solve_root(next);
  policy.root = {root.control, root.value};
  return policy;
}

}  // namespace nabc
