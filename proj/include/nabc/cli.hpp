#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nabc/config.hpp"
#include "nabc/evaluate.hpp"
#include "nabc/policy.hpp"

namespace nabc {

/// Solves one method (every c0 in the config for AB unless `prior_mass` is
/// given) and writes policy-*.json files plus manifest.txt into `out_dir`.
std::vector<std::filesystem::path> run_solve(const ExperimentConfig& config, Method method,
                                             std::optional<double> prior_mass,
                                             const std::filesystem::path& out_dir, int threads = 1);

/// Evaluates every policy-*.json in `out_dir` on one shared noise array and
/// writes the report files.
std::vector<EvalReport> run_evaluate(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                     int threads = 1, bool wealth_paths = false);

/// AB for every c0, SR and AD, evaluated on shared out-of-sample noise.
/// `label` only decorates error messages.
std::vector<EvalReport> run_reproduce(const ExperimentConfig& config, const std::string& label,
                                      const std::filesystem::path& out_dir, int threads = 1,
                                      bool wealth_paths = false);

/// Writes summary_stats.csv, strategy_paths.csv, utility_dist.csv, mu_paths.csv
/// and optionally wealth_paths.csv.
void write_reports(const std::vector<EvalReport>& reports, const std::filesystem::path& out_dir,
                   bool wealth_paths);

std::string summary_csv(const std::vector<EvalReport>& reports);

/// Parses a small-problem instance file and returns the oracle report text.
std::string run_oracle(const std::filesystem::path& instance);

}  // namespace nabc
