#include "nabc/config.hpp"

#include <cmath>
#include <string>

#include "nabc/errors.hpp"
#include "nabc/random.hpp"

namespace nabc {

namespace {

void require(bool ok, std::string_view key, std::string_view what) {
  if (!ok) throw InputError("config: " + std::string(key) + " " + std::string(what));
}

}  // namespace

void ExperimentConfig::validate() const {
  require(horizon >= 1, "T", "must be at least 1");
  require(std::isfinite(rate) && rate > -1.0, "r", "must be finite and exceed -1");
  require(std::isfinite(eta) && eta > 1.0, "eta", "must exceed 1");
  require(std::isfinite(initial_wealth) && initial_wealth > 0.0, "y0", "must be positive");
  require(design_paths >= 1, "N", "must be at least 1");
  require(eval_paths >= 1, "N_prime", "must be at least 1");
  require(inner_samples >= 1, "L", "must be at least 1");
  require(moments >= 1 && moments <= kMaxMoments, "M", "must lie in [1, 8]");
  require(history_size >= 1, "t0", "must be at least 1");
  require(!prior_masses.empty(), "c0_list", "must not be empty");
  for (double c0 : prior_masses) require(std::isfinite(c0) && c0 > 0.0, "c0_list", "entries must be positive");
  require(confidence_level > 0.0 && confidence_level < 1.0, "confidence_level", "must lie in (0, 1)");
  require(!mu0_hat || std::isfinite(*mu0_hat), "mu0_hat", "must be finite");
  require(!sigma0_sq_hat || (std::isfinite(*sigma0_sq_hat) && *sigma0_sq_hat > 0.0), "sigma0_sq_hat",
          "must be positive");
  require(mu0_hat.has_value() == sigma0_sq_hat.has_value(), "mu0_hat",
          "and sigma0_sq_hat must be given together");
  require(!(!mu0_hat && history_size < 2), "t0", "must be at least 2 when estimates are simulated");
  require(quadrature_nodes >= 1, "gh_nodes", "must be at least 1");
  require(region_boundary_points >= 1, "region_boundary_points", "must be at least 1");
  require(region_rings >= 0, "region_rings", "must be non-negative");
  require(gp.nugget > 0.0 && gp.nugget <= gp.max_nugget, "gp_nugget", "must lie in (0, 1e-2]");
  require(gp.starts >= 1, "gp_starts", "must be at least 1");
  require(gp.max_evaluations >= 1, "gp_max_evaluations", "must be at least 1");
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.horizon == b.horizon && a.rate == b.rate && a.eta == b.eta &&
         a.initial_wealth == b.initial_wealth && a.design_paths == b.design_paths &&
         a.eval_paths == b.eval_paths && a.inner_samples == b.inner_samples &&
         a.moments == b.moments && a.history_size == b.history_size &&
         a.prior_masses == b.prior_masses && a.confidence_level == b.confidence_level &&
         a.sampling_measure == b.sampling_measure && a.mu0_hat == b.mu0_hat &&
         a.sigma0_sq_hat == b.sigma0_sq_hat && a.seeds == b.seeds &&
         a.quadrature_nodes == b.quadrature_nodes &&
         a.region_boundary_points == b.region_boundary_points &&
         a.region_rings == b.region_rings && a.gp.nugget == b.gp.nugget &&
         a.gp.starts == b.gp.starts && a.gp.max_evaluations == b.gp.max_evaluations;
}

ExperimentConfig preset(std::string_view case_id, Scale scale) {
  ExperimentConfig c;
  c.horizon = 30;
  c.rate = 6.667e-4;
  c.initial_wealth = 100.0;
  c.design_paths = 600;
  c.eval_paths = 200;
  c.inner_samples = 1000;
  c.moments = 4;
  c.history_size = 100;
  c.prior_masses = {1.0, 5.0, 10.0, 20.0, 30.0};
  c.confidence_level = 0.8;

  const bool case1 = case_id == "1-1" || case_id == "1-2";
  const bool case2 = case_id == "2-1" || case_id == "2-2";
  if (!case1 && !case2) throw InputError("unknown case '" + std::string(case_id) + "' (expected 1-1, 1-2, 2-1 or 2-2)");
  if (case1) {
    c.eta = 1.5;
    c.sampling_measure = MixtureMeasure({{0.5, -6.667e-4, 7.303e-2 * 7.303e-2},
                                         {0.5, 4.333e-3, 5.477e-2 * 5.477e-2}});
  } else {
    c.eta = 1.002;
    c.sampling_measure = MixtureMeasure({{0.5, 1.333e-3, 5.477e-2 * 5.477e-2},
                                         {0.5, 4.333e-3, 9.129e-2 * 9.129e-2}});
  }
  // Initial estimates (mean, standard deviation) reported per case.
  double mu0 = 0.0;
  double sd0 = 0.0;
  if (case_id == "1-1") { mu0 = 4.615e-3; sd0 = 5.609e-2; }
  if (case_id == "1-2") { mu0 = -3.987e-3; sd0 = 6.288e-2; }
  if (case_id == "2-1") { mu0 = 6.255e-4; sd0 = 7.090e-2; }
  if (case_id == "2-2") { mu0 = -8.347e-3; sd0 = 7.805e-2; }
  c.mu0_hat = mu0;
  c.sigma0_sq_hat = sd0 * sd0;

  if (scale == Scale::ci) {
    c.horizon = 10;
    c.design_paths = 200;
    c.inner_samples = 300;
  }
  return c;
}

void override_seeds(ExperimentConfig& config, std::uint64_t seed) {
  config.seeds.design = derive_seed(seed, {1});
  config.seeds.inner = derive_seed(seed, {2});
  config.seeds.evaluation = derive_seed(seed, {3});
  config.seeds.history = derive_seed(seed, {4});
}

}  // namespace nabc
