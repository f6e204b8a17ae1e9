// tests/oracle_helpers.hpp

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

// Test-only oracles.  Everything here goes through an independent numeric
// path (Eigen decompositions, direct summation, quadrature) so it can
// cross-check the library without sharing its code.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "plda/data_stats.hpp"
#include "plda/em_engine.hpp"
#include "plda/rng.hpp"
#include "plda/spd_math.hpp"

namespace oracle {

inline Eigen::MatrixXd to_eigen(const plda::SymMatrix &m) {
  Eigen::MatrixXd out(m.dim(), m.dim());
  for (int r = 0; r < m.dim(); ++r)
    for (int c = 0; c < m.dim(); ++c) out(r, c) = m(r, c);
  return out;
}

/// log det via an eigendecomposition (independent of any Cholesky).
inline double logdet_eigen(const plda::SymMatrix &m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(m));
  double s = 0.0;
  for (int i = 0; i < m.dim(); ++i) s += std::log(es.eigenvalues()[i]);
  return s;
}

/// Random SPD matrix M^T M / dim + I, entries of M standard normal.
inline plda::SymMatrix random_spd(plda::NormalSampler &rng, int dim,
                                  double scale = 1.0) {
  std::vector<double> m(static_cast<std::size_t>(dim) * dim);
  rng.fill_normal(m);
  std::vector<double> raw(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      double s = 0.0;
      for (int k = 0; k < dim; ++k)
        s += m[static_cast<std::size_t>(k) * dim + r] *
             m[static_cast<std::size_t>(k) * dim + c];
      raw[static_cast<std::size_t>(r) * dim + c] =
          scale * (s / dim + (r == c ? 1.0 : 0.0));
    }
  return plda::SymMatrix(dim, raw);
}

/// Random SPD matrix exactly as M^T M + I (no scaling).
inline plda::SymMatrix random_spd_mtm_plus_i(plda::NormalSampler &rng,
                                             int dim) {
  std::vector<double> m(static_cast<std::size_t>(dim) * dim);
  rng.fill_normal(m);
  std::vector<double> raw(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      double s = 0.0;
      for (int k = 0; k < dim; ++k)
        s += m[static_cast<std::size_t>(k) * dim + r] *
             m[static_cast<std::size_t>(k) * dim + c];
      raw[static_cast<std::size_t>(r) * dim + c] = s + (r == c ? 1.0 : 0.0);
    }
  return plda::SymMatrix(dim, raw);
}

/// Posterior mean and variance of the scalar product
/// N(x | 0, prior_var) * N(x | obs_mean, obs_var), by trapezoid quadrature
/// on [-10, 10] with step 1e-4.
struct ScalarPosterior {
  double mean = 0.0;
  double variance = 0.0;
};

inline ScalarPosterior quadrature_posterior(double prior_var, double obs_mean,
                                            double obs_var) {
  const double lo = -10.0, hi = 10.0, step = 1e-4;
  const auto n = static_cast<std::size_t>((hi - lo) / step + 0.5);
  double mass = 0.0, first = 0.0, second = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    const double g = std::exp(-0.5 * x * x / prior_var -
                              0.5 * (x - obs_mean) * (x - obs_mean) / obs_var);
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    mass += w * g;
    first += w * g * x;
    second += w * g * x * x;
  }
  ScalarPosterior post;
  post.mean = first / mass;
  post.variance = second / mass - post.mean * post.mean;
  return post;
}

/// Exact log-density of all samples of a dataset under the model, using
/// the full joint covariance per class (between + delta_ij * within over
/// sample pairs), factored by Eigen.
inline double brute_force_log_likelihood(const plda::LabeledDataset &data,
                                         const plda::PldaModel &model) {
  std::map<std::string, std::vector<const plda::Record *>> by_class;
  for (const plda::Record &rec : data.records)
    by_class[rec.class_id].push_back(&rec);

  const int d = model.dim;
  const Eigen::MatrixXd between = to_eigen(model.between_var);
  const Eigen::MatrixXd within = to_eigen(model.within_var);

  double ll = 0.0;
  for (const auto &[label, recs] : by_class) {
    const auto n = static_cast<int>(recs.size());
    Eigen::MatrixXd big(n * d, n * d);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        big.block(i * d, j * d, d, d) =
            i == j ? (between + within).eval() : between;
    Eigen::VectorXd z(n * d);
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < d; ++c)
        z[i * d + c] = recs[i]->values[c] - model.mean[c];
    Eigen::LLT<Eigen::MatrixXd> llt(big);
    const Eigen::MatrixXd l = llt.matrixL();
    double logdet = 0.0;
    for (int i = 0; i < n * d; ++i) logdet += 2.0 * std::log(l(i, i));
    const double quad = z.dot(llt.solve(z));
    ll += -0.5 * (n * d * plda::kLog2Pi + logdet + quad);
  }
  return ll;
}

/// Direct-summation dataset statistics: total scatter around the global
/// mean and within-class scatter, no shortcuts.
struct DirectStats {
  std::vector<double> mean;
  plda::SymMatrix total_scatter;   // sum (z - mean)(z - mean)^T
  plda::SymMatrix within_scatter;  // sum over classes of (z - c_k)(...)^T
};

inline DirectStats direct_stats(const plda::LabeledDataset &data) {
  const int d = data.dim;
  std::vector<double> mean(d, 0.0);
  for (const plda::Record &rec : data.records)
    for (int j = 0; j < d; ++j) mean[j] += rec.values[j];
  for (double &v : mean) v /= static_cast<double>(data.records.size());

  std::map<std::string, std::vector<const plda::Record *>> by_class;
  for (const plda::Record &rec : data.records)
    by_class[rec.class_id].push_back(&rec);

  plda::SymMatrix total(d), within(d);
  for (const plda::Record &rec : data.records)
    total.add_outer(plda::subtract(rec.values, mean), 1.0);
  for (const auto &[label, recs] : by_class) {
    std::vector<double> c(d, 0.0);
    for (const plda::Record *rec : recs)
      for (int j = 0; j < d; ++j) c[j] += rec->values[j];
    for (double &v : c) v /= static_cast<double>(recs.size());
    for (const plda::Record *rec : recs)
      within.add_outer(plda::subtract(rec->values, c), 1.0);
  }
  return DirectStats{std::move(mean), std::move(total), std::move(within)};
}

/// Relative Frobenius distance between two symmetric matrices.
inline double rel_frobenius(const plda::SymMatrix &a,
                            const plda::SymMatrix &b) {
  plda::SymMatrix diff = a;
  diff.add_scaled(b, -1.0);
  return diff.norm() / b.norm();
}

/// Max absolute entry difference.
inline double max_abs_diff(const plda::SymMatrix &a,
                           const plda::SymMatrix &b) {
  plda::SymMatrix diff = a;
  diff.add_scaled(b, -1.0);
  return diff.max_abs();
}

}  // namespace oracle
