// plda/scoring.hpp

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

#include <span>
#include <string>
#include <vector>

#include "plda/em_engine.hpp"
#include "plda/spd_math.hpp"

namespace plda {

/// A class enrolled for verification: the posterior over its center,
/// computed from however many vectors were provided.
struct Enrollment {
  ClassPosterior posterior;
  int model_dim = 0;
};

/// Centers the vectors by the model mean, averages them, and takes the
/// exact posterior of the class center given that average.
inline Enrollment enroll(const PldaModel &model,
                         std::span<const std::vector<double>> vectors) {
  model.validate();
  if (vectors.empty())
    throw EmptyEnrollment("enroll: need at least one vector");
  std::vector<double> sum(model.dim, 0.0);
  for (const std::vector<double> &v : vectors) {
    if (static_cast<int>(v.size()) != model.dim)
      throw DimensionMismatch("enroll: vector length " +
                              std::to_string(v.size()) + " vs model dim " +
                              std::to_string(model.dim));
    for (int j = 0; j < model.dim; ++j) sum[j] += v[j];
  }
  std::vector<double> centered_mean = subtract(
      scaled(sum, 1.0 / static_cast<double>(vectors.size())), model.mean);
  Enrollment enrollment;
  enrollment.posterior = e_step_class(
      model, centered_mean, static_cast<std::int64_t>(vectors.size()));
  enrollment.model_dim = model.dim;
  return enrollment;
}

/// Same-class versus different-class log-likelihood ratio for one test
/// vector.  With t the centered test vector:
///   same:      N(t; posterior mean, posterior covariance + within)
///   different: N(t; 0, between + within)
inline double score_llr(const PldaModel &model, const Enrollment &enrollment,
                        std::span<const double> test) {
  model.validate();
  if (enrollment.model_dim != model.dim)
    throw DimensionMismatch("score_llr: enrollment dim " +
                            std::to_string(enrollment.model_dim) +
                            " vs model dim " + std::to_string(model.dim));
  if (static_cast<int>(test.size()) != model.dim)
    throw DimensionMismatch("score_llr: test length " +
                            std::to_string(test.size()) + " vs model dim " +
                            std::to_string(model.dim));
  std::vector<double> t = subtract(test, model.mean);

  SymMatrix same_cov = enrollment.posterior.covariance;
  same_cov.add_scaled(model.within_var, 1.0);
  SymMatrix diff_cov = model.between_var;
  diff_cov.add_scaled(model.within_var, 1.0);

  const std::vector<double> zero(model.dim, 0.0);
  return log_gaussian(t, enrollment.posterior.mean, same_cov) -
         log_gaussian(t, zero, diff_cov);
}

}  // namespace plda
