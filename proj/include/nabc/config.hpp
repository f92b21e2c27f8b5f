#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nabc/gp.hpp"
#include "nabc/measures.hpp"

namespace nabc {

struct Seeds {
  std::uint64_t design = 1;
  std::uint64_t inner = 2;
  std::uint64_t evaluation = 3;
  std::uint64_t history = 4;

  friend bool operator==(const Seeds&, const Seeds&) = default;
};

/// Every scalar that defines one experiment. Field comments give the key used
/// in configuration files.
struct ExperimentConfig {
  int horizon = 30;                  // T
  double rate = 0.0;                 // r, per period
  double eta = 1.5;                  // eta, CRRA risk aversion
  double initial_wealth = 100.0;     // y0
  int design_paths = 600;            // N
  int eval_paths = 200;              // N_prime
  int inner_samples = 1000;          // L
  int moments = 4;                   // M
  int history_size = 100;            // t0
  std::vector<double> prior_masses{1.0};  // c0_list
  double confidence_level = 0.8;     // confidence_level
  MixtureMeasure sampling_measure{{{1.0, 0.0, 1.0}}};  // sampling_measure
  std::optional<double> mu0_hat;        // mu0_hat
  std::optional<double> sigma0_sq_hat;  // sigma0_sq_hat
  Seeds seeds;                          // seeds

  // Resolution settings; optional in files.
  int quadrature_nodes = 16;        // gh_nodes
  int region_boundary_points = 64;  // region_boundary_points
  int region_rings = 2;             // region_rings
  gp::FitOptions gp;                // gp_nugget, gp_starts, gp_max_evaluations

  /// Throws InputError naming the offending key.
  void validate() const;

  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);
};

enum class Scale { full, ci };

/// Parameter sets of the four portfolio cases ("1-1", "1-2", "2-1", "2-2").
/// The CI scale shortens the horizon and shrinks the design and inner sample
/// sizes (T = 10, N = 200, L = 300).
ExperimentConfig preset(std::string_view case_id, Scale scale = Scale::full);

/// Replaces all four seeds by values derived from `seed`.
void override_seeds(ExperimentConfig& config, std::uint64_t seed);

}  // namespace nabc
