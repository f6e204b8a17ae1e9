// plda/em_engine.hpp

// Copyright 2026  The plda2cov Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "plda/data_stats.hpp"
#include "plda/spd_math.hpp"

namespace plda {

inline constexpr double kLog2Pi = 1.8378770664093454836;

/// The learned object: global mean plus between-class and within-class
/// covariances.  The within-class covariance must be positive definite for
/// anything that inverts it; the between-class covariance may be merely
/// positive semidefinite (the EM engine jitters it before inversion).
struct PldaModel {
  int dim = 0;
  std::vector<double> mean;
  SymMatrix between_var;  ///< covariance of class centers around the mean
  SymMatrix within_var;   ///< covariance of samples around their center

  void validate() const {
    if (dim < 1) throw InvalidArgument("PldaModel: dim must be >= 1");
    if (static_cast<int>(mean.size()) != dim || between_var.dim() != dim ||
        within_var.dim() != dim)
      throw DimensionMismatch("PldaModel: mean/covariance dims disagree");
  }
};

/// Posterior of the between-class latent given a class's centered mean:
/// covariance and mean, plus the sample count it was computed for.
struct ClassPosterior {
  SymMatrix covariance;      ///< shrinks toward zero as count grows
  std::vector<double> mean;  ///< pulled from the class mean toward zero
  std::int64_t count = 0;
};

enum class MStepVariant { kPaper, kKaldi };
enum class InitMethod { kIdentity, kDataSplit };

struct TrainConfig {
  int iterations = 10;
  MStepVariant variant = MStepVariant::kKaldi;
  /// Epsilon added as eps*I whenever a covariance loses positive
  /// definiteness.  Unset means 1e-8 * trace/dim of the failing matrix.
  std::optional<double> jitter;
  /// Relative log-likelihood improvement below which training stops early.
  /// Zero (the default) runs the fixed iteration count.
  double tolerance = 0.0;
  InitMethod init = InitMethod::kDataSplit;

  void validate() const {
    if (iterations < 1)
      throw InvalidConfig("TrainConfig: iterations must be >= 1, got " +
                          std::to_string(iterations));
    if (jitter && *jitter < 0.0)
      throw InvalidConfig("TrainConfig: jitter must be >= 0");
    if (tolerance < 0.0) throw InvalidConfig("TrainConfig: tolerance < 0");
  }
};

/// Per-iteration training diagnostics.
struct IterationStats {
  double log_likelihood = 0.0;
  double between_var_trace = 0.0;
  double within_var_trace = 0.0;
  /// Smallest Cholesky pivot squared across the two updated covariances.
  double min_eigen_estimate = 0.0;
  bool between_var_jittered = false;  ///< M-step output needed jitter
  bool within_var_jittered = false;
  int prior_jitter_count = 0;  ///< E-step between-var inversions jittered
};

struct TrainReport {
  std::vector<IterationStats> iterations;
  bool init_jittered = false;
};

namespace detail {

/// Adds eps*I until the Cholesky succeeds, starting from the configured
/// epsilon (or 1e-8 * trace/dim) and escalating tenfold.  Keeps the factor
/// so callers can reuse it.
struct PdMatrix {
  SymMatrix matrix;
  CholeskyFactor chol;
  bool jittered;
};

inline PdMatrix ensure_positive_definite(SymMatrix m,
                                         std::optional<double> jitter) {
  try {
    CholeskyFactor chol = cholesky(m);
    return PdMatrix{std::move(m), std::move(chol), false};
  } catch (const NotPositiveDefinite &) {
  }
  double eps =
      jitter.value_or(1e-8 * m.trace() / static_cast<double>(m.dim()));
  if (!(eps > 0.0)) eps = 1e-12;
  for (int attempt = 0; attempt < 64; ++attempt) {
    m.add_diag(eps);
    try {
      CholeskyFactor chol = cholesky(m);
      return PdMatrix{std::move(m), std::move(chol), true};
    } catch (const NotPositiveDefinite &) {
      eps *= 10.0;
    }
  }
  throw NotPositiveDefinite(
      "ensure_positive_definite: still indefinite after escalating jitter");
}

}  // namespace detail

/// Precisions of the current model, computed once per E-step sweep.  The
/// within-class covariance must be invertible; a rank-deficient
/// between-class covariance is jittered before inversion and the event
/// counted.
struct PriorPrecision {
  SymMatrix between_inv;
  SymMatrix within_inv;
  int jitter_events = 0;
};

inline PriorPrecision make_prior_precision(
    const PldaModel &model, std::optional<double> jitter = std::nullopt) {
  model.validate();
  PriorPrecision prior;
  prior.within_inv = inverse_spd(model.within_var);  // throws if singular
  detail::PdMatrix pd =
      detail::ensure_positive_definite(model.between_var, jitter);
  prior.between_inv = pd.chol.inverse();
  prior.jitter_events = pd.jittered ? 1 : 0;
  return prior;
}

/// Exact Gaussian posterior of the between-class latent given a class's
/// centered mean and sample count.  The posterior precision is the sum of
/// the prior precisions, solved in precision space through one Cholesky:
///   covariance = (between^{-1} + n * within^{-1})^{-1}
///   mean       = covariance * n * within^{-1} * centered_mean
inline ClassPosterior e_step_class(const PriorPrecision &prior,
                                   std::span<const double> centered_mean,
                                   std::int64_t count) {
  if (count < 1)
    throw InvalidArgument("e_step_class: count must be >= 1, got " +
                          std::to_string(count));
  const int d = prior.within_inv.dim();
  if (static_cast<int>(centered_mean.size()) != d)
    throw DimensionMismatch("e_step_class: mean length " +
                            std::to_string(centered_mean.size()) + " vs dim " +
                            std::to_string(d));
  SymMatrix precision = prior.between_inv;
  precision.add_scaled(prior.within_inv, static_cast<double>(count));
  CholeskyFactor chol = cholesky(precision);
  std::vector<double> natural =
      scaled(matvec(prior.within_inv, centered_mean),
             static_cast<double>(count));
  ClassPosterior post;
  post.covariance = chol.inverse();
  post.mean = chol.solve(natural);
  post.count = count;
  return post;
}

inline ClassPosterior e_step_class(const PldaModel &model,
                                   std::span<const double> centered_mean,
                                   std::int64_t count) {
  return e_step_class(make_prior_precision(model), centered_mean, count);
}

/// Result of one M step.  Outputs are symmetrized and forced positive
/// definite; the jitter flags record whether that required intervention.
struct MStepResult {
  SymMatrix between_var;
  SymMatrix within_var;
  bool between_var_jittered = false;
  bool within_var_jittered = false;
  double min_eigen_estimate = 0.0;
};

/// Covariance updates from the per-class posteriors:
///   between <- (1/K) sum_k (post_cov_k + mean_k mean_k^T)       [always]
///   within  <- (1/K) sum_k n_k (post_cov_k + r_k r_k^T)         [kPaper]
///   within  <- (1/N) (S + sum_k n_k (post_cov_k + r_k r_k^T))   [kKaldi]
/// with r_k = post_mean_k - class_mean_k.  The kKaldi form adds the raw
/// within-class scatter, so it keeps credit for sample-level spread that
/// the pooled class means cannot see.
inline MStepResult m_step(std::span<const ClassPosterior> posteriors,
                          std::span<const std::vector<double>> class_means,
                          const DatasetStats &stats, MStepVariant variant,
                          std::optional<double> jitter = std::nullopt) {
  const std::size_t K = stats.classes.size();
  if (posteriors.size() != K || class_means.size() != K)
    throw AlignmentError("m_step: " + std::to_string(posteriors.size()) +
                         " posteriors, " + std::to_string(class_means.size()) +
                         " means, " + std::to_string(K) + " classes");
  const int d = stats.dim;
  SymMatrix between_acc(d);
  SymMatrix within_acc(d);
  for (std::size_t k = 0; k < K; ++k) {
    const ClassPosterior &post = posteriors[k];
    if (post.covariance.dim() != d ||
        static_cast<int>(post.mean.size()) != d ||
        static_cast<int>(class_means[k].size()) != d)
      throw AlignmentError("m_step: posterior " + std::to_string(k) +
                           " has wrong dimension");
    const auto n = static_cast<double>(stats.classes[k].count);
    between_acc.add_scaled(post.covariance, 1.0);
    between_acc.add_outer(post.mean, 1.0);
    within_acc.add_scaled(post.covariance, n);
    within_acc.add_outer(subtract(post.mean, class_means[k]), n);
  }
  between_acc.scale(1.0 / static_cast<double>(K));
  if (variant == MStepVariant::kKaldi) {
    within_acc.add_scaled(stats.scatter, 1.0);
    within_acc.scale(1.0 / static_cast<double>(stats.total_count));
  } else {
    within_acc.scale(1.0 / static_cast<double>(K));
  }

  detail::PdMatrix between =
      detail::ensure_positive_definite(std::move(between_acc), jitter);
  detail::PdMatrix within =
      detail::ensure_positive_definite(std::move(within_acc), jitter);
  MStepResult result;
  const double min_pivot =
      std::min(between.chol.min_pivot(), within.chol.min_pivot());
  result.min_eigen_estimate = min_pivot * min_pivot;
  result.between_var = std::move(between.matrix);
  result.within_var = std::move(within.matrix);
  result.between_var_jittered = between.jittered;
  result.within_var_jittered = within.jittered;
  return result;
}

/// Log-density of a multivariate normal.
inline double log_gaussian(std::span<const double> x,
                           std::span<const double> mean,
                           const SymMatrix &covariance) {
  require_same_size(x, mean, "log_gaussian");
  CholeskyFactor chol = cholesky(covariance);
  std::vector<double> r = subtract(x, mean);
  return -0.5 * (covariance.dim() * kLog2Pi + chol.log_det() +
                 chol.quad_form_inv(r));
}

/// Exact observed-data log-likelihood with the class centers integrated
/// out.  Per class the samples decompose into the within-class residuals
/// and the class mean, whose marginal is N(0, between + within/n); the
/// residual terms collapse onto the pooled scatter:
///   -(N d / 2) log 2pi - ((N-K)/2) log|within| - (1/2) tr(within^{-1} S)
///   + sum_k [ -(d/2) log n_k - (1/2) log|between + within/n_k|
///             - (1/2) m_k^T (between + within/n_k)^{-1} m_k ]
/// Classes sharing a count reuse one factorization.
inline double log_likelihood(const PldaModel &model,
                             const DatasetStats &stats) {
  model.validate();
  if (stats.dim != model.dim)
    throw DimensionMismatch("log_likelihood: stats dim " +
                            std::to_string(stats.dim) + " vs model dim " +
                            std::to_string(model.dim));
  const int d = model.dim;
  const auto N = static_cast<double>(stats.total_count);
  const auto K = static_cast<double>(stats.num_classes);

  CholeskyFactor within_chol = cholesky(model.within_var);
  double trace_term = 0.0;
  {
    std::vector<double> col(d);
    for (int c = 0; c < d; ++c) {
      for (int r = 0; r < d; ++r) col[r] = stats.scatter(r, c);
      trace_term += within_chol.solve(col)[c];
    }
  }

  double ll = -0.5 * N * d * kLog2Pi - 0.5 * (N - K) * within_chol.log_det() -
              0.5 * trace_term;

  std::map<std::int64_t, CholeskyFactor> by_count;
  for (const ClassStats &cls : stats.classes) {
    auto it = by_count.find(cls.count);
    if (it == by_count.end()) {
      SymMatrix marginal = model.between_var;
      marginal.add_scaled(model.within_var,
                          1.0 / static_cast<double>(cls.count));
      it = by_count.emplace(cls.count, cholesky(marginal)).first;
    }
    const CholeskyFactor &chol = it->second;
    ll += -0.5 * d * std::log(static_cast<double>(cls.count)) -
          0.5 * chol.log_det() - 0.5 * chol.quad_form_inv(cls.centered_mean);
  }
  return ll;
}

namespace detail {

inline PldaModel initialize_model(const DatasetStats &stats,
                                  const TrainConfig &config,
                                  TrainReport *report) {
  PldaModel model;
  model.dim = stats.dim;
  model.mean = stats.mean;
  if (config.init == InitMethod::kIdentity) {
    model.between_var = SymMatrix::identity(stats.dim);
    model.within_var = SymMatrix::identity(stats.dim);
    return model;
  }
  // Moment split: within from the pooled scatter, between as the remainder
  // of the total covariance.
  const auto N = static_cast<double>(stats.total_count);
  SymMatrix within(stats.dim);
  if (stats.total_count > stats.num_classes) {
    within = stats.scatter;
    within.scale(1.0 /
                 static_cast<double>(stats.total_count - stats.num_classes));
  } else {
    within = SymMatrix::identity(stats.dim);  // all-singleton dataset
  }
  SymMatrix total = stats.scatter;
  for (const ClassStats &cls : stats.classes)
    total.add_outer(cls.centered_mean, static_cast<double>(cls.count));
  total.scale(1.0 / N);
  SymMatrix between = total;
  between.add_scaled(within, -1.0);

  detail::PdMatrix within_pd =
      detail::ensure_positive_definite(std::move(within), config.jitter);
  detail::PdMatrix between_pd =
      detail::ensure_positive_definite(std::move(between), config.jitter);
  if (report)
    report->init_jittered = within_pd.jittered || between_pd.jittered;
  model.within_var = std::move(within_pd.matrix);
  model.between_var = std::move(between_pd.matrix);
  return model;
}

}  // namespace detail

struct TrainResult {
  PldaModel model;
  TrainReport report;
};

/// Full EM training: accumulates statistics once, fixes the global mean,
/// then alternates per-class posteriors with covariance updates.  The
/// log-likelihood is evaluated after each update; with a nonzero tolerance
/// training stops as soon as the relative improvement falls below it.
inline TrainResult em_train(const LabeledDataset &data,
                            const TrainConfig &config) {
  config.validate();
  DatasetStats stats = accumulate_stats(data);

  TrainResult result;
  result.model = detail::initialize_model(stats, config, &result.report);

  std::vector<std::vector<double>> class_means;
  class_means.reserve(stats.classes.size());
  for (const ClassStats &cls : stats.classes)
    class_means.push_back(cls.centered_mean);

  double previous_ll = 0.0;
  for (int iter = 0; iter < config.iterations; ++iter) {
    PriorPrecision prior = make_prior_precision(result.model, config.jitter);
    std::vector<ClassPosterior> posteriors;
    posteriors.reserve(stats.classes.size());
    for (std::size_t k = 0; k < stats.classes.size(); ++k)
      posteriors.push_back(
          e_step_class(prior, class_means[k], stats.classes[k].count));

    MStepResult update = m_step(posteriors, class_means, stats,
                                config.variant, config.jitter);
    result.model.between_var = std::move(update.between_var);
    result.model.within_var = std::move(update.within_var);

    const double ll = log_likelihood(result.model, stats);
    if (!std::isfinite(ll))
      throw NonFiniteLikelihood(
          "em_train: log-likelihood became non-finite at iteration " +
          std::to_string(iter + 1) + " (between trace " +
          std::to_string(result.model.between_var.trace()) +
          ", within trace " +
          std::to_string(result.model.within_var.trace()) + ")");

    IterationStats is;
    is.log_likelihood = ll;
    is.between_var_trace = result.model.between_var.trace();
    is.within_var_trace = result.model.within_var.trace();
    is.min_eigen_estimate = update.min_eigen_estimate;
    is.between_var_jittered = update.between_var_jittered;
    is.within_var_jittered = update.within_var_jittered;
    is.prior_jitter_count = prior.jitter_events;
    result.report.iterations.push_back(is);

    if (config.tolerance > 0.0 && iter > 0 &&
        ll - previous_ll < config.tolerance * std::abs(previous_ll))
      break;
    previous_ll = ll;
  }
  return result;
}

}  // namespace plda
