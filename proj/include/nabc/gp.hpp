#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "nabc/errors.hpp"

namespace nabc::gp {

/// ARD Matern-5/2 hyperparameters. Lengthscales are expressed in the
/// surrogate's scaled input coordinates, one per retained input dimension.
struct KernelHyper {
  double signal_var = 1.0;
  Eigen::VectorXd lengthscales;
  double nugget_var = 1e-6;
};

/// (1 + sqrt5 d + 5 d^2 / 3) exp(-sqrt5 d) for a lengthscale-weighted distance d.
inline double matern52_profile(double distance) {
  const double r = std::sqrt(5.0) * distance;
  return (1.0 + r + r * r / 3.0) * std::exp(-r);
}

template <typename DerivedA, typename DerivedB>
double matern52(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                const KernelHyper& hyper) {
  if (a.size() != b.size() || a.size() != hyper.lengthscales.size())
    throw InputError("matern52: dimension mismatch");
  // Summing squared differences term by term keeps k(a, b) == k(b, a) bitwise.
  double d2 = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double t = (a(i) - b(i)) / hyper.lengthscales(i);
    d2 += t * t;
  }
  return hyper.signal_var * matern52_profile(std::sqrt(d2));
}

/// Per-dimension affine map of raw inputs onto [0, 1]. Dimensions whose
/// training range is degenerate are left out of `active` and ignored by the
/// kernel.
struct InputScaling {
  Eigen::VectorXd lower;
  Eigen::VectorXd range;
  std::vector<int> active;
};

struct FitOptions {
  double nugget = 1e-6;
  double max_nugget = 1e-2;
  int starts = 5;
  int max_evaluations = 200;
  double log_lengthscale_lo = std::log(0.05);
  double log_lengthscale_hi = std::log(5.0);
  double log_signal_sd_lo = std::log(0.1);
  double log_signal_sd_hi = std::log(10.0);
  /// Workers used for the multi-start search; results do not depend on it.
  int threads = 1;
};

/// A fitted zero-mean GP regression on standardized targets. Immutable after
/// construction and safe to query concurrently.
class Surrogate {
 public:
  Surrogate() = default;

  int input_dim() const { return static_cast<int>(raw_inputs_.cols()); }
  int size() const { return static_cast<int>(raw_inputs_.rows()); }
  bool is_constant() const { return constant_; }

  const Eigen::MatrixXd& raw_inputs() const { return raw_inputs_; }
  const Eigen::VectorXd& raw_targets() const { return raw_targets_; }
  const InputScaling& scaling() const { return scaling_; }
  const KernelHyper& hyper() const { return hyper_; }
  double target_mean() const { return target_mean_; }
  double target_sd() const { return target_sd_; }
  double log_marginal_likelihood() const { return log_likelihood_; }

  /// Training inputs mapped to scaled coordinates (retained dimensions only).
  const Eigen::MatrixXd& scaled_inputs() const { return scaled_inputs_; }
  /// [K + eps^2 I]^{-1} y on standardized targets.
  const Eigen::VectorXd& weights() const { return weights_; }

  double predict(const Eigen::Ref<const Eigen::VectorXd>& query) const;

  /// Scaled coordinates of a raw query on the retained dimensions.
  Eigen::VectorXd scale(const Eigen::Ref<const Eigen::VectorXd>& query) const;

  friend Surrogate assemble(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                            const InputScaling& scaling, double target_mean, double target_sd,
                            const KernelHyper& hyper);
  friend Surrogate constant_surrogate(const Eigen::MatrixXd& inputs,
                                      const Eigen::VectorXd& targets, double value);

 private:
  Eigen::MatrixXd raw_inputs_;
  Eigen::VectorXd raw_targets_;
  InputScaling scaling_;
  Eigen::MatrixXd scaled_inputs_;
  double target_mean_ = 0.0;
  double target_sd_ = 1.0;
  KernelHyper hyper_;
  Eigen::VectorXd weights_;
  double log_likelihood_ = 0.0;
  bool constant_ = false;
};

/// Rebuilds a model from training data and fixed hyperparameters.
/// Throws FitError if the kernel system is not positive definite.
Surrogate assemble(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                   const InputScaling& scaling, double target_mean, double target_sd,
                   const KernelHyper& hyper);

/// A model that predicts `value` everywhere; keeps the training data for
/// serialization.
Surrogate constant_surrogate(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                             double value);

/// Rows of `inputs` are training points. Scales inputs, standardizes targets
/// and maximizes the log marginal likelihood over lengthscales and signal
/// variance from `options.starts` quasi-random starting points.
Surrogate fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets, std::uint64_t seed,
              const FitOptions& options = {});

inline double predict(const Surrogate& model, const Eigen::Ref<const Eigen::VectorXd>& query) {
  return model.predict(query);
}

/// Starting points of the likelihood search in (log lengthscale..., log
/// signal sd) coordinates for `dims` retained dimensions.
std::vector<Eigen::VectorXd> start_points(int dims, std::uint64_t seed, const FitOptions& options = {});

InputScaling compute_scaling(const Eigen::MatrixXd& inputs);

/// Log marginal likelihood of standardized targets `y` at scaled inputs `x`.
/// Returns -infinity when the kernel matrix cannot be factored.
double log_marginal_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               const KernelHyper& hyper);

/// Batch predictions for a fixed set of query rows in which a single
/// coordinate (`free_dim`) varies between calls. The contribution of the
/// other coordinates to each kernel distance is computed once.
class SliceEvaluator {
 public:
  SliceEvaluator(const Surrogate& model, const Eigen::MatrixXd& queries, int free_dim);

  /// One prediction per query row, with the free coordinate replaced by `free_values`.
  Eigen::VectorXd predict(const Eigen::Ref<const Eigen::VectorXd>& free_values) const;

 private:
  const Surrogate* model_;
  Eigen::Index rows_;
  int free_dim_;
  int free_active_ = -1;
  Eigen::ArrayXXd base_sq_;
  Eigen::VectorXd fixed_;
};

/// Piecewise cubic Hermite table of a one-input surrogate on [lower, upper]
/// built from exact values and derivatives at equally spaced knots. Queries
/// outside the interval fall back to direct prediction.
class Tabulated1D {
 public:
  Tabulated1D(const Surrogate& model, double lower, double upper, int knots = 4097);

  double operator()(double x) const;

  double lower() const { return lower_; }
  double upper() const { return upper_; }

 private:
  const Surrogate* model_;
  double lower_;
  double upper_;
  double step_;
  Eigen::VectorXd values_;
  Eigen::VectorXd slopes_;
};

}  // namespace nabc::gp
