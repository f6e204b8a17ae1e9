// plda/data_stats.hpp

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
#include <string>
#include <unordered_map>
#include <vector>

#include "plda/spd_math.hpp"

namespace plda {

/// One labeled vector.  Labels are opaque strings.
struct Record {
  std::string class_id;
  std::vector<double> values;
};

struct LabeledDataset {
  int dim = 0;
  std::vector<Record> records;
};

/// Per-class sufficient statistics.
struct ClassStats {
  std::string label;
  std::int64_t count = 0;             ///< n_k
  std::vector<double> mean;           ///< class mean of the raw vectors
  std::vector<double> centered_mean;  ///< mean minus the global mean
};

/// Everything the EM engine needs from a dataset: global mean, per-class
/// counts and means, and the pooled within-class scatter matrix.
struct DatasetStats {
  int dim = 0;
  std::int64_t total_count = 0;  ///< N
  std::int64_t num_classes = 0;  ///< K
  std::vector<double> mean;         ///< global mean over all samples
  std::vector<ClassStats> classes;  ///< first-appearance order
  SymMatrix scatter;  ///< S = sum over classes of within-class outer products
};

/// Single pass over the records (plus one pass for the scatter): global
/// mean, per-class stats, and S = sum_k sum_i (z - c_k)(z - c_k)^T.
/// Classes are indexed in order of first appearance; for a fixed record
/// ordering the result is bitwise deterministic.
inline DatasetStats accumulate_stats(const LabeledDataset &data) {
  const int d = data.dim;
  if (d < 1)
    throw DimensionMismatch("accumulate_stats: dataset dim must be >= 1");

  std::unordered_map<std::string, std::size_t> index;
  std::vector<ClassStats> classes;
  std::vector<std::vector<double>> sums;
  std::vector<double> total_sum(d, 0.0);

  for (std::size_t i = 0; i < data.records.size(); ++i) {
    const Record &rec = data.records[i];
    if (static_cast<int>(rec.values.size()) != d)
      throw DimensionMismatch("accumulate_stats: record " + std::to_string(i) +
                              " has length " +
                              std::to_string(rec.values.size()) +
                              ", expected " + std::to_string(d));
    auto [it, inserted] = index.try_emplace(rec.class_id, classes.size());
    if (inserted) {
      classes.push_back(ClassStats{rec.class_id, 0, {}, {}});
      sums.emplace_back(d, 0.0);
    }
    ClassStats &cs = classes[it->second];
    cs.count += 1;
    std::vector<double> &sum = sums[it->second];
    for (int j = 0; j < d; ++j) sum[j] += rec.values[j];
    for (int j = 0; j < d; ++j) total_sum[j] += rec.values[j];
  }

  if (classes.size() < 2)
    throw TooFewClasses("accumulate_stats: need at least 2 classes, got " +
                        std::to_string(classes.size()));

  const auto total = static_cast<std::int64_t>(data.records.size());
  std::vector<double> mu = scaled(total_sum, 1.0 / static_cast<double>(total));
  for (std::size_t k = 0; k < classes.size(); ++k) {
    classes[k].mean =
        scaled(sums[k], 1.0 / static_cast<double>(classes[k].count));
    classes[k].centered_mean = subtract(classes[k].mean, mu);
  }

  SymMatrix scatter(d);
  for (const Record &rec : data.records) {
    const ClassStats &cs = classes[index.at(rec.class_id)];
    scatter.add_outer(subtract(rec.values, cs.mean), 1.0);
  }

  DatasetStats stats;
  stats.dim = d;
  stats.total_count = total;
  stats.num_classes = static_cast<std::int64_t>(classes.size());
  stats.mean = std::move(mu);
  stats.classes = std::move(classes);
  stats.scatter = std::move(scatter);
  return stats;
}

/// Returns a copy of the dataset with mu subtracted from every vector.
inline LabeledDataset center_dataset(const LabeledDataset &data,
                                     std::span<const double> mu) {
  if (static_cast<int>(mu.size()) != data.dim)
    throw DimensionMismatch("center_dataset: mu has length " +
                            std::to_string(mu.size()) + ", dataset dim is " +
                            std::to_string(data.dim));
  LabeledDataset out;
  out.dim = data.dim;
  out.records.reserve(data.records.size());
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    const Record &rec = data.records[i];
    if (rec.values.size() != mu.size())
      throw DimensionMismatch("center_dataset: record " + std::to_string(i) +
                              " has length " +
                              std::to_string(rec.values.size()) +
                              ", expected " + std::to_string(mu.size()));
    out.records.push_back(Record{rec.class_id, subtract(rec.values, mu)});
  }
  return out;
}

}  // namespace plda
