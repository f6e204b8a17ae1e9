// tools/plda_main.cpp

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

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "plda/plda.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDataError = 1;
constexpr int kExitUsage = 2;

struct TrainArgs {
  std::string data_path;
  std::string out_path;
  int iters = 10;
  std::string variant = "kaldi";
  std::string init = "data-split";
  double tol = 0.0;
  std::string report_path;
};

int run_train(const TrainArgs &args) {
  plda::TrainConfig config;
  config.iterations = args.iters;
  config.variant = args.variant == "paper" ? plda::MStepVariant::kPaper
                                           : plda::MStepVariant::kKaldi;
  config.init = args.init == "identity" ? plda::InitMethod::kIdentity
                                        : plda::InitMethod::kDataSplit;
  config.tolerance = args.tol;
  config.validate();

  plda::LabeledDataset data = plda::read_embeddings_file(args.data_path);
  plda::TrainResult result = plda::em_train(data, config);
  plda::write_model_file(args.out_path, result.model);

  if (!args.report_path.empty()) {
    std::ofstream os(args.report_path);
    if (!os)
      throw plda::Error("cannot open '" + args.report_path +
                        "' for writing");
    for (std::size_t i = 0; i < result.report.iterations.size(); ++i)
      os << (i + 1) << '\t'
         << plda::format_double(result.report.iterations[i].log_likelihood)
         << '\n';
  }
  std::cerr << "trained " << result.report.iterations.size()
            << " iterations, final log-likelihood "
            << plda::format_double(
                   result.report.iterations.back().log_likelihood)
            << "\n";
  return kExitOk;
}

struct SynthArgs {
  int dim = 0;
  std::int64_t classes = 0;
  std::int64_t per_class = 0;
  std::uint64_t seed = 0;
  std::string phi_b_path;
  std::string phi_w_path;
  std::string out_path;
};

int run_synth(const SynthArgs &args) {
  plda::SynthSpec spec =
      plda::SynthSpec::uniform(args.dim, args.classes, args.per_class,
                               args.seed);
  if (!args.phi_b_path.empty())
    spec.between_var = plda::read_matrix_file(args.phi_b_path, args.dim);
  if (!args.phi_w_path.empty())
    spec.within_var = plda::read_matrix_file(args.phi_w_path, args.dim);
  plda::write_embeddings_file(args.out_path, plda::generate(spec));
  return kExitOk;
}

struct ScoreArgs {
  std::string model_path;
  std::string enroll_path;
  std::string test_path;
  std::string trials_path;
  std::string out_path;
};

int run_score(const ScoreArgs &args) {
  plda::PldaModel model = plda::read_model_file(args.model_path);
  plda::LabeledDataset enroll_data =
      plda::read_embeddings_file(args.enroll_path);
  plda::LabeledDataset test_data = plda::read_embeddings_file(args.test_path);
  std::vector<plda::Trial> trials = plda::read_trials_file(args.trials_path);

  std::map<std::string, std::vector<std::vector<double>>> by_class;
  for (const plda::Record &rec : enroll_data.records)
    by_class[rec.class_id].push_back(rec.values);
  std::map<std::string, plda::Enrollment> enrollments;
  for (const auto &[label, vectors] : by_class)
    enrollments.emplace(label, plda::enroll(model, vectors));

  std::ofstream os(args.out_path);
  if (!os)
    throw plda::Error("cannot open '" + args.out_path + "' for writing");
  for (const plda::Trial &trial : trials) {
    auto it = enrollments.find(trial.enroll_id);
    if (it == enrollments.end())
      throw plda::ParseError(trial.line_number, "unknown enrollment class '" +
                                                    trial.enroll_id + "'");
    if (trial.test_index >=
        static_cast<std::int64_t>(test_data.records.size()))
      throw plda::ParseError(
          trial.line_number,
          "test index " + std::to_string(trial.test_index) +
              " out of range (file has " +
              std::to_string(test_data.records.size()) + " vectors)");
    const double llr = plda::score_llr(
        model, it->second, test_data.records[trial.test_index].values);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", llr);
    os << trial.enroll_id << '\t' << trial.test_index << '\t' << buf << '\n';
  }
  return kExitOk;
}

void print_pivot_stats(const char *name, const plda::SymMatrix &m) {
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
  };
  std::cout << name << "_trace\t" << fmt(m.trace()) << "\n";
  try {
    plda::CholeskyFactor chol = plda::cholesky(m);
    const double lo = chol.min_pivot();
    const double hi = chol.max_pivot();
    std::cout << name << "_min_pivot_sq\t" << fmt(lo * lo) << "\n";
    std::cout << name << "_max_pivot_sq\t" << fmt(hi * hi) << "\n";
  } catch (const plda::NotPositiveDefinite &) {
    std::cout << name << "_min_pivot_sq\tnot_positive_definite\n";
    std::cout << name << "_max_pivot_sq\tnot_positive_definite\n";
  }
}

int run_inspect(const std::string &model_path) {
  plda::PldaModel model = plda::read_model_file(model_path);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", plda::norm(model.mean));
  std::cout << "dim\t" << model.dim << "\n";
  std::cout << "mean_norm\t" << buf << "\n";
  print_pivot_stats("between_var", model.between_var);
  print_pivot_stats("within_var", model.within_var);
  return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Two-covariance PLDA: train, synthesize, score, inspect"};
  app.require_subcommand(1);

  TrainArgs train_args;
  CLI::App *train = app.add_subcommand(
      "train", "Train a model from a PLDA-TXT embedding file");
  train->add_option("--data", train_args.data_path, "input embeddings")
      ->required();
  train->add_option("--out", train_args.out_path, "output model file")
      ->required();
  train->add_option("--iters", train_args.iters, "EM iterations")
      ->default_val(10)
      ->check(CLI::PositiveNumber);
  train->add_option("--variant", train_args.variant, "M-step variant")
      ->default_val("kaldi")
      ->check(CLI::IsMember({"paper", "kaldi"}));
  train->add_option("--init", train_args.init, "initialization")
      ->default_val("data-split")
      ->check(CLI::IsMember({"identity", "data-split"}));
  train->add_option("--tol", train_args.tol,
                    "relative improvement for early stop (0 = fixed count)")
      ->default_val(0.0)
      ->check(CLI::NonNegativeNumber);
  train->add_option("--report", train_args.report_path,
                    "per-iteration log-likelihood file");

  SynthArgs synth_args;
  CLI::App *synth = app.add_subcommand(
      "synth", "Sample a dataset from the generative model");
  synth->add_option("--dim", synth_args.dim, "vector dimension")
      ->required()
      ->check(CLI::PositiveNumber);
  synth->add_option("--classes", synth_args.classes, "number of classes")
      ->required()
      ->check(CLI::Range(std::int64_t{2},
                         std::numeric_limits<std::int64_t>::max()));
  synth->add_option("--per-class", synth_args.per_class, "samples per class")
      ->required()
      ->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_args.seed, "PRNG seed")->required();
  synth->add_option("--phi-b", synth_args.phi_b_path,
                    "between-class covariance file (default identity)");
  synth->add_option("--phi-w", synth_args.phi_w_path,
                    "within-class covariance file (default identity)");
  synth->add_option("--out", synth_args.out_path, "output embeddings")
      ->required();

  ScoreArgs score_args;
  CLI::App *score =
      app.add_subcommand("score", "Score a trial list against enrollments");
  score->add_option("--model", score_args.model_path, "model file")
      ->required();
  score->add_option("--enroll", score_args.enroll_path,
                    "enrollment embeddings (grouped by class_id)")
      ->required();
  score->add_option("--test", score_args.test_path, "test embeddings")
      ->required();
  score->add_option("--trials", score_args.trials_path, "trial list")
      ->required();
  score->add_option("--out", score_args.out_path, "output score file")
      ->required();

  std::string inspect_model;
  CLI::App *inspect =
      app.add_subcommand("inspect", "Print summary statistics of a model");
  inspect->add_option("--model", inspect_model, "model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*train) return run_train(train_args);
    if (*synth) return run_synth(synth_args);
    if (*score) return run_score(score_args);
    if (*inspect) return run_inspect(inspect_model);
  } catch (const plda::InvalidConfig &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const plda::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitUsage;
}
