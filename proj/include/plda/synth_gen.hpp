// plda/synth_gen.hpp

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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plda/data_stats.hpp"
#include "plda/rng.hpp"
#include "plda/spd_math.hpp"

namespace plda {

/// Parameters for sampling a dataset from the two-stage generative
/// process: one center per class drawn around the mean with the
/// between-class covariance, then samples around that center with the
/// within-class covariance.
struct SynthSpec {
  int dim = 0;
  std::vector<std::int64_t> samples_per_class;  ///< one entry per class
  std::vector<double> mean;
  SymMatrix between_var;
  SymMatrix within_var;
  std::uint64_t seed = 0;

  static SynthSpec uniform(int dim, std::int64_t num_classes,
                           std::int64_t samples_per_class,
                           std::uint64_t seed) {
    SynthSpec spec;
    spec.dim = dim;
    spec.samples_per_class.assign(num_classes, samples_per_class);
    spec.mean.assign(dim, 0.0);
    spec.between_var = SymMatrix::identity(dim);
    spec.within_var = SymMatrix::identity(dim);
    spec.seed = seed;
    return spec;
  }

  void validate() const {
    if (dim < 1) throw InvalidArgument("SynthSpec: dim must be >= 1");
    if (samples_per_class.size() < 2)
      throw TooFewClasses("SynthSpec: need at least 2 classes, got " +
                          std::to_string(samples_per_class.size()));
    for (std::int64_t n : samples_per_class)
      if (n < 1)
        throw InvalidArgument("SynthSpec: samples per class must be >= 1");
    if (static_cast<int>(mean.size()) != dim || between_var.dim() != dim ||
        within_var.dim() != dim)
      throw DimensionMismatch("SynthSpec: mean/covariance dims disagree");
  }
};

/// Samples the dataset.  Fully deterministic given the seed: one
/// mt19937_64 stream, normals via the AS 241 inverse CDF, draws consumed
/// class-major, sample-minor, component-minor.  Class k is labeled
/// "c<k>".  An exactly-zero covariance skips its Cholesky, contributes
/// nothing, and consumes no draws; any other non-PD covariance is an
/// error.
inline LabeledDataset generate(const SynthSpec &spec) {
  spec.validate();
  std::optional<CholeskyFactor> between_chol;
  if (!spec.between_var.is_zero()) between_chol = cholesky(spec.between_var);
  std::optional<CholeskyFactor> within_chol;
  if (!spec.within_var.is_zero()) within_chol = cholesky(spec.within_var);

  NormalSampler sampler(spec.seed);
  std::vector<double> draws(spec.dim);

  LabeledDataset data;
  data.dim = spec.dim;
  std::int64_t total = 0;
  for (std::int64_t n : spec.samples_per_class) total += n;
  data.records.reserve(total);

  for (std::size_t k = 0; k < spec.samples_per_class.size(); ++k) {
    std::vector<double> center = spec.mean;
    if (between_chol) {
      sampler.fill_normal(draws);
      center = add(center, between_chol->lower_times(draws));
    }
    const std::string label = "c" + std::to_string(k);
    for (std::int64_t i = 0; i < spec.samples_per_class[k]; ++i) {
      std::vector<double> sample = center;
      if (within_chol) {
        sampler.fill_normal(draws);
        sample = add(sample, within_chol->lower_times(draws));
      }
      data.records.push_back(Record{label, std::move(sample)});
    }
  }
  return data;
}

}  // namespace plda
