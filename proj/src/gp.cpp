#include "nabc/gp.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

#include <Eigen/Cholesky>

#include "nabc/optimize.hpp"
#include "nabc/parallel.hpp"
#include "nabc/random.hpp"

namespace nabc::gp {

namespace {

constexpr double kLogBoundLo = -6.907755278982137;  // log(1e-3)
constexpr double kLogBoundHi = 6.907755278982137;

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& x, const KernelHyper& hyper) {
  const Eigen::MatrixXd xs = x.array().rowwise() / hyper.lengthscales.transpose().array();
  const Eigen::VectorXd norms = xs.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = -2.0 * xs * xs.transpose();
  d2.colwise() += norms;
  d2.rowwise() += norms.transpose();
  Eigen::ArrayXXd r = (5.0 * d2.array().max(0.0)).sqrt();
  r.matrix().diagonal().setZero();
  Eigen::MatrixXd k = (hyper.signal_var * (1.0 + r + r.square() / 3.0) * (-r).exp()).matrix();
  k.diagonal().array() += hyper.nugget_var;
  return k;
}

double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

int nth_prime(int n) {
  static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  return primes[n % 16];
}

KernelHyper hyper_from(const Eigen::VectorXd& theta, double nugget) {
  const Eigen::Index d = theta.size() - 1;
  KernelHyper h;
  h.lengthscales = theta.head(d).array().exp();
  h.signal_var = std::exp(2.0 * theta(d));
  h.nugget_var = nugget;
  return h;
}

}  // namespace

InputScaling compute_scaling(const Eigen::MatrixXd& inputs) {
  InputScaling s;
  const Eigen::Index dims = inputs.cols();
  s.lower.resize(dims);
  s.range.resize(dims);
  for (Eigen::Index j = 0; j < dims; ++j) {
    const double lo = inputs.col(j).minCoeff();
    const double hi = inputs.col(j).maxCoeff();
    const double range = hi - lo;
    s.lower(j) = lo;
    if (range > 0.0 && range > 1e-9 * std::max(std::abs(lo), std::abs(hi))) {
      s.range(j) = range;
      s.active.push_back(static_cast<int>(j));
    } else {
      s.range(j) = 1.0;
    }
  }
  return s;
}

double log_marginal_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               const KernelHyper& hyper) {
  const Eigen::LLT<Eigen::MatrixXd> llt(kernel_matrix(x, hyper));
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const Eigen::MatrixXd& l = llt.matrixLLT();
  if ((l.diagonal().array() <= 0.0).any()) return -std::numeric_limits<double>::infinity();
  const Eigen::VectorXd alpha = llt.solve(y);
  const double n = static_cast<double>(y.size());
  return -0.5 * y.dot(alpha) - l.diagonal().array().log().sum() -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

Eigen::VectorXd Surrogate::scale(const Eigen::Ref<const Eigen::VectorXd>& query) const {
  if (query.size() != input_dim()) throw InputError("surrogate: query dimension mismatch");
  Eigen::VectorXd q(scaling_.active.size());
  for (std::size_t k = 0; k < scaling_.active.size(); ++k) {
    const int j = scaling_.active[k];
    q(k) = (query(j) - scaling_.lower(j)) / scaling_.range(j);
  }
  return q;
}

double Surrogate::predict(const Eigen::Ref<const Eigen::VectorXd>& query) const {
  if (query.size() != input_dim()) throw InputError("surrogate: query dimension mismatch");
  if (constant_) return target_mean_;
  const Eigen::VectorXd q = scale(query);
  const Eigen::ArrayXd d2 =
      ((scaled_inputs_.rowwise() - q.transpose()).array().rowwise() /
       hyper_.lengthscales.transpose().array())
          .square()
          .rowwise()
          .sum();
  const Eigen::ArrayXd r = (5.0 * d2).sqrt();
  const Eigen::VectorXd k = ((1.0 + r + r.square() / 3.0) * (-r).exp()).matrix();
  return target_mean_ + target_sd_ * hyper_.signal_var * k.dot(weights_);
}

Surrogate assemble(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                   const InputScaling& scaling, double target_mean, double target_sd,
                   const KernelHyper& hyper) {
  if (inputs.rows() != targets.size() || inputs.rows() < 1)
    throw InputError("surrogate: inputs and targets must be non-empty and of equal length");
  if (hyper.lengthscales.size() != static_cast<Eigen::Index>(scaling.active.size()))
    throw InputError("surrogate: lengthscale count must equal retained input dimension");
  if (!(hyper.signal_var > 0.0) || !(hyper.nugget_var > 0.0) || (hyper.lengthscales.array() <= 0.0).any())
    throw InputError("surrogate: hyperparameters must be strictly positive");
  Surrogate s;
  s.raw_inputs_ = inputs;
  s.raw_targets_ = targets;
  s.scaling_ = scaling;
  s.target_mean_ = target_mean;
  s.target_sd_ = target_sd;
  s.hyper_ = hyper;
  s.scaled_inputs_.resize(inputs.rows(), static_cast<Eigen::Index>(scaling.active.size()));
  for (std::size_t k = 0; k < scaling.active.size(); ++k) {
    const int j = scaling.active[k];
    s.scaled_inputs_.col(k) = (inputs.col(j).array() - scaling.lower(j)) / scaling.range(j);
  }
  const Eigen::VectorXd y = (targets.array() - target_mean) / target_sd;
  const Eigen::LLT<Eigen::MatrixXd> llt(kernel_matrix(s.scaled_inputs_, hyper));
  if (llt.info() != Eigen::Success) throw FitError("surrogate: kernel matrix is not positive definite");
  const Eigen::MatrixXd& l = llt.matrixLLT();
  s.weights_ = llt.solve(y);
  if (!s.weights_.allFinite()) throw FitError("surrogate: non-finite kernel solve");
  const double n = static_cast<double>(y.size());
  s.log_likelihood_ = -0.5 * y.dot(s.weights_) - l.diagonal().array().log().sum() -
                      0.5 * n * std::log(2.0 * std::numbers::pi);
  return s;
}

Surrogate constant_surrogate(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                             double value) {
  Surrogate s;
  s.raw_inputs_ = inputs;
  s.raw_targets_ = targets;
  s.scaling_ = compute_scaling(inputs);
  s.target_mean_ = value;
  s.target_sd_ = 0.0;
  s.hyper_.lengthscales = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(s.scaling_.active.size()));
  s.constant_ = true;
  return s;
}

std::vector<Eigen::VectorXd> start_points(int dims, std::uint64_t seed, const FitOptions& options) {
  // Cranley-Patterson rotated Halton points over the log-hyperparameter box.
  Rng rng(derive_seed(seed, {0x6770ULL}));
  Eigen::VectorXd shift(dims + 1);
  for (Eigen::Index k = 0; k <= dims; ++k) shift(k) = uniform01(rng);
  const int starts = std::max(1, options.starts);
  std::vector<Eigen::VectorXd> initial(starts, Eigen::VectorXd(dims + 1));
  for (int s = 0; s < starts; ++s) {
    for (Eigen::Index k = 0; k <= dims; ++k) {
      double u = radical_inverse(static_cast<std::uint64_t>(s) + 1, nth_prime(static_cast<int>(k))) + shift(k);
      u -= std::floor(u);
      const bool is_sd = k == dims;
      const double lo = is_sd ? options.log_signal_sd_lo : options.log_lengthscale_lo;
      const double hi = is_sd ? options.log_signal_sd_hi : options.log_lengthscale_hi;
      initial[s](k) = lo + u * (hi - lo);
    }
  }
  return initial;
}

Surrogate fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets, std::uint64_t seed,
              const FitOptions& options) {
  const Eigen::Index n = inputs.rows();
  if (n < 1 || targets.size() != n) throw InputError("fit: need matching, non-empty inputs and targets");
  if (!inputs.allFinite() || !targets.allFinite()) throw InputError("fit: inputs and targets must be finite");

  if ((targets.array() == targets(0)).all()) return constant_surrogate(inputs, targets, targets(0));
  const double mean = targets.mean();
  const double sd = std::sqrt((targets.array() - mean).square().mean());
  const InputScaling scaling = compute_scaling(inputs);
  if (sd <= 1e-12 * std::max(1.0, std::abs(mean)) || scaling.active.empty() || n == 1)
    return constant_surrogate(inputs, targets, mean);

  const Eigen::Index dims = static_cast<Eigen::Index>(scaling.active.size());
  Eigen::MatrixXd x(n, dims);
  for (Eigen::Index k = 0; k < dims; ++k) {
    const int j = scaling.active[k];
    x.col(k) = (inputs.col(j).array() - scaling.lower(j)) / scaling.range(j);
  }
  const Eigen::VectorXd y = (targets.array() - mean) / sd;

  const std::vector<Eigen::VectorXd> initial = start_points(static_cast<int>(dims), seed, options);
  const int starts = static_cast<int>(initial.size());

  for (double nugget = options.nugget; nugget <= options.max_nugget * (1.0 + 1e-9); nugget *= 10.0) {
    auto objective = [&](const Eigen::VectorXd& theta) {
      if ((theta.array() < kLogBoundLo).any() || (theta.array() > kLogBoundHi).any())
        return std::numeric_limits<double>::infinity();
      return -log_marginal_likelihood(x, y, hyper_from(theta, nugget));
    };
    std::vector<NelderMeadResult> results(starts);
    parallel_for(static_cast<std::size_t>(starts), options.threads, [&](std::size_t s) {
      results[s] = nelder_mead(objective, initial[s], 0.5, options.max_evaluations);
    });
    int best = -1;
    for (int s = 0; s < starts; ++s)
      if (std::isfinite(results[s].value) && (best < 0 || results[s].value < results[best].value)) best = s;
    if (best < 0) continue;
    return assemble(inputs, targets, scaling, mean, sd, hyper_from(results[best].point, nugget));
  }
  throw FitError("fit: kernel matrix not positive definite even at the largest nugget");
}

SliceEvaluator::SliceEvaluator(const Surrogate& model, const Eigen::MatrixXd& queries, int free_dim)
    : model_(&model), rows_(queries.rows()), free_dim_(free_dim) {
  if (queries.cols() != model.input_dim()) throw InputError("slice: query dimension mismatch");
  if (free_dim < 0 || free_dim >= model.input_dim()) throw InputError("slice: free dimension out of range");
  if (model.is_constant()) return;
  const auto& scaling = model.scaling();
  const auto& x = model.scaled_inputs();
  const auto& ell = model.hyper().lengthscales;
  for (std::size_t k = 0; k < scaling.active.size(); ++k) {
    const int j = scaling.active[k];
    if (j == free_dim) {
      free_active_ = static_cast<int>(k);
      continue;
    }
    if (base_sq_.size() == 0) base_sq_ = Eigen::ArrayXXd::Zero(rows_, x.rows());
    const Eigen::ArrayXd q = (queries.col(j).array() - scaling.lower(j)) / (scaling.range(j) * ell(k));
    const Eigen::ArrayXd t = x.col(k).array() / ell(k);
    base_sq_ += (q.replicate(1, x.rows()) - t.transpose().replicate(rows_, 1)).square();
  }
  if (base_sq_.size() != 0) base_sq_ *= 5.0;
  if (free_active_ < 0) {
    if (base_sq_.size() == 0) base_sq_ = Eigen::ArrayXXd::Zero(rows_, x.rows());
    const Eigen::ArrayXXd r = base_sq_.sqrt();
    fixed_ = model.target_mean() +
             model.target_sd() * model.hyper().signal_var *
                 (((1.0 + r + r.square() / 3.0) * (-r).exp()).matrix() * model.weights()).array();
  }
}

Eigen::VectorXd SliceEvaluator::predict(const Eigen::Ref<const Eigen::VectorXd>& free_values) const {
  if (free_values.size() != rows_) throw InputError("slice: expected one free value per query row");
  const Surrogate& m = *model_;
  if (m.is_constant()) return Eigen::VectorXd::Constant(rows_, m.target_mean());
  if (free_active_ < 0) return fixed_;
  const int j = free_dim_;
  const double ell = m.hyper().lengthscales(free_active_);
  const double lower = m.scaling().lower(j);
  const double range = m.scaling().range(j);
  // Distances are kept in sqrt(5)-scaled units; one training column at a
  // time keeps the working set in cache.
  const double root5 = std::sqrt(5.0);
  const Eigen::ArrayXd q = (free_values.array() - lower) * (root5 / (range * ell));
  const Eigen::ArrayXd t = m.scaled_inputs().col(free_active_).array() * (root5 / ell);
  const Eigen::VectorXd& alpha = m.weights();
  const bool has_base = base_sq_.size() != 0;
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(rows_);
  Eigen::ArrayXd r(rows_);
  for (Eigen::Index c = 0; c < t.size(); ++c) {
    if (has_base) r = (base_sq_.col(c) + (q - t(c)).square()).sqrt();
    else r = (q - t(c)).abs();
    acc += alpha(c) * ((1.0 + r + r.square() * (1.0 / 3.0)) * (-r).exp());
  }
  return (m.target_mean() + m.target_sd() * m.hyper().signal_var * acc).matrix();
}

Tabulated1D::Tabulated1D(const Surrogate& model, double lower, double upper, int knots)
    : model_(&model), lower_(lower), upper_(upper) {
  if (model.input_dim() != 1) throw InputError("tabulate: surrogate must have one input");
  if (!(upper > lower) || knots < 2) throw InputError("tabulate: need upper > lower and at least two knots");
  step_ = (upper - lower) / (knots - 1);
  const Eigen::ArrayXd grid = Eigen::ArrayXd::LinSpaced(knots, lower, upper);
  if (model.is_constant() || model.scaling().active.empty()) {
    values_ = Eigen::VectorXd::Constant(knots, model.predict(Eigen::VectorXd::Constant(1, lower)));
    slopes_ = Eigen::VectorXd::Zero(knots);
    return;
  }
  const double ell = model.hyper().lengthscales(0);
  const double range = model.scaling().range(0);
  const Eigen::ArrayXd q = (grid - model.scaling().lower(0)) / (range * ell);
  const Eigen::ArrayXd t = model.scaled_inputs().col(0).array() / ell;
  const Eigen::ArrayXXd diff = q.replicate(1, t.size()) - t.transpose().replicate(knots, 1);
  const Eigen::ArrayXXd r = std::sqrt(5.0) * diff.abs();
  const Eigen::ArrayXXd decay = (-r).exp();
  const Eigen::ArrayXXd k = (1.0 + r + r.square() / 3.0) * decay;
  // d/dq of the Matern-5/2 profile: -(5/3) d (1 + sqrt5 |d|) exp(-sqrt5 |d|).
  const Eigen::ArrayXXd dk = -(5.0 / 3.0) * diff * (1.0 + r) * decay;
  const double scale = model.target_sd() * model.hyper().signal_var;
  values_ = (model.target_mean() + scale * (k.matrix() * model.weights()).array()).matrix();
  slopes_ = scale / (range * ell) * (dk.matrix() * model.weights());
}

double Tabulated1D::operator()(double x) const {
  if (!(x >= lower_ && x <= upper_)) return model_->predict(Eigen::VectorXd::Constant(1, x));
  const auto last = values_.size() - 1;
  auto i = static_cast<Eigen::Index>((x - lower_) / step_);
  if (i >= last) i = last - 1;
  const double s = (x - lower_) / step_ - static_cast<double>(i);
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2.0 * s3 - 3.0 * s2 + 1.0) * values_(i) + (s3 - 2.0 * s2 + s) * step_ * slopes_(i) +
         (-2.0 * s3 + 3.0 * s2) * values_(i + 1) + (s3 - s2) * step_ * slopes_(i + 1);
}

}  // namespace nabc::gp
