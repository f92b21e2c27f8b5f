#include "nabc/cli.hpp"

#include <algorithm>
#include <cstdio>

#include "nabc/baselines.hpp"
#include "nabc/errors.hpp"
#include "nabc/io.hpp"
#include "nabc/oracle.hpp"
#include "nabc/solver_ab.hpp"

namespace nabc {

namespace {

namespace fs = std::filesystem;

std::string hex(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(value));
  return buffer;
}

std::string policy_name(Method method, std::optional<double> prior_mass) {
  std::string name = "policy-" + std::string(to_string(method));
  if (prior_mass) name += "-c0-" + format_number(*prior_mass);
  return name + ".json";
}

Policy solve_one(const ExperimentConfig& config, Method method, std::optional<double> prior_mass, int threads) {
  switch (method) {
    case Method::ab: return solve_adaptive_bayes(config, *prior_mass, threads);
    case Method::sr: return solve_strong_robust(config, threads);
    case Method::ad: return solve_adaptive(config, threads);
  }
  throw InputError("unknown method");
}

std::string c0_cell(const EvalReport& r) { return r.prior_mass ? format_number(*r.prior_mass) : std::string(); }

}  // namespace

std::vector<fs::path> run_solve(const ExperimentConfig& config, Method method, std::optional<double> prior_mass,
                                const fs::path& out_dir, int threads) {
  config.validate();
  if (method != Method::ab && prior_mass) throw InputError("--c0 applies to the ab method only");
  std::vector<std::optional<double>> masses;
  if (method == Method::ab) {
    if (prior_mass) masses.push_back(prior_mass);
    else masses.assign(config.prior_masses.begin(), config.prior_masses.end());
  } else {
    masses.push_back(std::nullopt);
  }

  const std::string config_text = emit_config(config);
  std::string manifest = "config_hash=" + hex(content_hash(config_text)) + "\n" +
                         "seeds=" + std::to_string(config.seeds.design) + "," + std::to_string(config.seeds.inner) +
                         "," + std::to_string(config.seeds.evaluation) + "," +
                         std::to_string(config.seeds.history) + "\n" + "method=" + std::string(to_string(method)) +
                         "\n";
  std::vector<fs::path> written;
  for (const auto& c0 : masses) {
    const std::string text = policy_to_json(solve_one(config, method, c0, threads));
    const fs::path path = out_dir / policy_name(method, c0);
    write_file_atomic(path, text);
    manifest += "policy=" + path.filename().string() + " " + hex(content_hash(text)) + "\n";
    written.push_back(path);
  }
  write_file_atomic(out_dir / "config.cfg", config_text);
  write_file_atomic(out_dir / "manifest.txt", manifest);
  return written;
}

std::vector<EvalReport> run_evaluate(const ExperimentConfig& config, const fs::path& out_dir, int threads,
                                     bool wealth_paths) {
  config.validate();
  std::vector<fs::path> files;
  if (fs::is_directory(out_dir))
    for (const auto& entry : fs::directory_iterator(out_dir)) {
      const std::string name = entry.path().filename().string();
      if (name.starts_with("policy-") && name.ends_with(".json")) files.push_back(entry.path());
    }
  if (files.empty()) throw InputError("evaluate: no policy-*.json files in " + out_dir.string());
  std::sort(files.begin(), files.end());

  const Eigen::MatrixXd noise =
      draw_noise(config.sampling_measure, config.eval_paths, config.horizon, config.seeds.evaluation);
  std::vector<EvalReport> reports;
  for (const auto& file : files) {
    const Policy policy = load_policy(file);
    if (policy.context.horizon != config.horizon)
      throw InputError("evaluate: " + file.filename().string() + " was solved for a different T");
    reports.push_back(simulate_out_of_sample(policy, noise, threads));
  }
  std::stable_sort(reports.begin(), reports.end(), [](const EvalReport& a, const EvalReport& b) {
    if (a.method != b.method) return a.method < b.method;
    return a.prior_mass.value_or(0.0) < b.prior_mass.value_or(0.0);
  });
  write_reports(reports, out_dir, wealth_paths);
  return reports;
}

std::vector<EvalReport> run_reproduce(const ExperimentConfig& config, const std::string& label,
                                      const fs::path& out_dir, int threads, bool wealth_paths) {
  try {
    config.validate();
    const Eigen::MatrixXd noise =
        draw_noise(config.sampling_measure, config.eval_paths, config.horizon, config.seeds.evaluation);
    std::vector<EvalReport> reports;
    for (double c0 : config.prior_masses)
      reports.push_back(simulate_out_of_sample(solve_adaptive_bayes(config, c0, threads), noise, threads));
    reports.push_back(simulate_out_of_sample(solve_strong_robust(config, threads), noise, threads));
    reports.push_back(simulate_out_of_sample(solve_adaptive(config, threads), noise, threads));
    write_file_atomic(out_dir / "config.cfg", emit_config(config));
    write_reports(reports, out_dir, wealth_paths);
    return reports;
  } catch (const SolverError& e) {
    throw SolverError("case " + label + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError("case " + label + ": " + e.what());
  }
}

std::string summary_csv(const std::vector<EvalReport>& reports) {
  CsvWriter csv({"method", "c0", "mean", "var", "q30", "q90", "max", "min"});
  for (const auto& r : reports)
    csv.cell(to_string(r.method))
        .cell(std::string_view(c0_cell(r)))
        .cell(r.stats.mean)
        .cell(r.stats.var)
        .cell(r.stats.q30)
        .cell(r.stats.q90)
        .cell(r.stats.max)
        .cell(r.stats.min)
        .end_row();
  return csv.str();
}

void write_reports(const std::vector<EvalReport>& reports, const fs::path& out_dir, bool wealth_paths) {
  CsvWriter strategy({"method", "c0", "path", "t", "control"});
  CsvWriter dist({"method", "c0", "path", "utility"});
  CsvWriter mu({"path", "t", "mu_hat", "sigma_sq_hat"});
  CsvWriter wealth({"method", "c0", "path", "t", "wealth"});
  for (const auto& r : reports) {
    const std::string method(to_string(r.method));
    const std::string c0 = c0_cell(r);
    for (Eigen::Index i = 0; i < r.strategy_paths.rows(); ++i) {
      for (Eigen::Index t = 0; t < r.strategy_paths.cols(); ++t)
        strategy.cell(method).cell(std::string_view(c0)).cell(static_cast<long long>(i)).cell(static_cast<long long>(t))
            .cell(r.strategy_paths(i, t)).end_row();
      dist.cell(method).cell(std::string_view(c0)).cell(static_cast<long long>(i)).cell(r.terminal_utilities(i)).end_row();
      if (wealth_paths)
        for (Eigen::Index t = 0; t < r.wealth_paths.cols(); ++t)
          wealth.cell(method).cell(std::string_view(c0)).cell(static_cast<long long>(i))
              .cell(static_cast<long long>(t)).cell(r.wealth_paths(i, t)).end_row();
      if (r.method == Method::ad)
        for (Eigen::Index t = 0; t < r.mean_paths.cols(); ++t)
          mu.cell(static_cast<long long>(i)).cell(static_cast<long long>(t)).cell(r.mean_paths(i, t))
              .cell(r.var_paths(i, t)).end_row();
    }
  }
  write_file_atomic(out_dir / "summary_stats.csv", summary_csv(reports));
  write_file_atomic(out_dir / "strategy_paths.csv", strategy.str());
  write_file_atomic(out_dir / "utility_dist.csv", dist.str());
  write_file_atomic(out_dir / "mu_paths.csv", mu.str());
  if (wealth_paths) write_file_atomic(out_dir / "wealth_paths.csv", wealth.str());
}

std::string run_oracle(const fs::path& instance) {
  return format_oracle(solve_oracle(parse_oracle_instance(read_file(instance))));
}

}  // namespace nabc
