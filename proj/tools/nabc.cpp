// Command-line front end: solve, evaluate, reproduce, oracle.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nabc/cli.hpp"
#include "nabc/config.hpp"
#include "nabc/errors.hpp"
#include "nabc/io.hpp"

namespace {

nabc::ExperimentConfig build_config(const std::string& config_path, const std::string& case_id,
                                    const std::string& scale, std::optional<std::uint64_t> seed) {
  nabc::ExperimentConfig config;
  if (!config_path.empty()) config = nabc::load_config(config_path);
  else if (!case_id.empty()) config = nabc::preset(case_id, scale == "ci" ? nabc::Scale::ci : nabc::Scale::full);
  else throw nabc::InputError("either --config or --case is required");
  if (seed) nabc::override_seeds(config, *seed);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive-Bayesian portfolio control with nonparametric priors"};
  app.require_subcommand(1);

  std::string config_path;
  std::string case_id;
  std::string scale = "full";
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  int threads = 1;
  std::string method;
  std::optional<double> c0;
  bool wealth = false;
  bool regenerate = false;
  std::string instance;

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Configuration file (key=value)");
    cmd->add_option("--case", case_id, "Preset case: 1-1, 1-2, 2-1 or 2-2");
    cmd->add_option("--scale", scale, "Preset scale")->check(CLI::IsMember({"full", "ci"}));
    cmd->add_option("--seed", seed, "Derive all seeds from this value");
    cmd->add_option("--out", out, "Output directory");
    cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  };

  auto* solve = app.add_subcommand("solve", "Fit a policy and write it to --out");
  common(solve);
  solve->add_option("--method", method, "ab, sr or ad")->required()->check(CLI::IsMember({"ab", "sr", "ad"}));
  solve->add_option("--c0", c0, "Prior mass (ab only; default: every c0 in the config)");

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate the policies stored in --out");
  common(evaluate);
  evaluate->add_flag("--wealth", wealth, "Also write wealth_paths.csv");

  auto* reproduce = app.add_subcommand("reproduce", "Run every method on a case and write the report files");
  common(reproduce);
  reproduce->add_flag("--wealth", wealth, "Also write wealth_paths.csv");
  reproduce->add_flag("--regenerate-estimates", regenerate,
                      "Estimate the initial mean and variance from t0 simulated observations");

  auto* oracle = app.add_subcommand("oracle", "Exhaustive grid solution of a small instance");
  oracle->add_option("instance", instance, "Instance file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (oracle->parsed()) {
      std::cout << nabc::run_oracle(instance);
      return 0;
    }
    nabc::ExperimentConfig config = build_config(config_path, case_id, scale, seed);
    if (solve->parsed()) {
      for (const auto& path : nabc::run_solve(config, nabc::parse_method(method), c0, out, threads))
        std::cout << path.string() << '\n';
    } else if (evaluate->parsed()) {
      std::cout << nabc::summary_csv(nabc::run_evaluate(config, out, threads, wealth));
    } else if (reproduce->parsed()) {
      if (regenerate) {
        config.mu0_hat.reset();
        config.sigma0_sq_hat.reset();
      }
      const std::string label = case_id.empty() ? config_path : case_id;
      std::cout << nabc::summary_csv(nabc::run_reproduce(config, label, out, threads, wealth));
    }
  } catch (const std::exception& e) {
    std::cerr << "nabc: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
