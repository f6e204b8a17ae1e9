// tests/scoring_test.cpp

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

#include <cmath>
#include <vector>

#include "catch2/catch_amalgamated.hpp"
#include "oracle_helpers.hpp"
#include "plda/scoring.hpp"
#include "plda/synth_gen.hpp"

using plda::Enrollment;
using plda::PldaModel;
using plda::SymMatrix;

namespace {

PldaModel make_model(int dim, SymMatrix between, SymMatrix within) {
  PldaModel model;
  model.dim = dim;
  model.mean.assign(dim, 0.0);
  model.between_var = std::move(between);
  model.within_var = std::move(within);
  return model;
}

}  // namespace

TEST_CASE("enrolling one vector halves it", "[scoring]") {
  PldaModel model =
      make_model(2, SymMatrix::identity(2), SymMatrix::identity(2));
  model.mean = {1.0, 1.0};
  const std::vector<std::vector<double>> vectors{{3.0, 2.0}};
  Enrollment e = plda::enroll(model, vectors);
  CHECK(e.posterior.mean[0] == Catch::Approx(1.0).margin(1e-14));   // (3-1)/2
  CHECK(e.posterior.mean[1] == Catch::Approx(0.5).margin(1e-14));   // (2-1)/2
  CHECK(e.posterior.count == 1);
}

TEST_CASE("repeated vectors only sharpen the posterior", "[scoring]") {
  plda::NormalSampler rng(70);
  PldaModel model =
      make_model(3, oracle::random_spd(rng, 3), oracle::random_spd(rng, 3));
  std::vector<double> v(3);
  rng.fill_normal(v);
  const std::vector<std::vector<double>> once{v};
  const std::vector<std::vector<double>> thrice{v, v, v};
  Enrollment e1 = plda::enroll(model, once);
  Enrollment e3 = plda::enroll(model, thrice);
  // Same mean as enrolling it once with count 3.
  plda::ClassPosterior direct =
      plda::e_step_class(model, plda::subtract(v, model.mean), 3);
  for (int j = 0; j < 3; ++j)
    CHECK(e3.posterior.mean[j] == Catch::Approx(direct.mean[j]).margin(1e-12));
  CHECK(oracle::max_abs_diff(e3.posterior.covariance, direct.covariance) <=
        1e-14);
  CHECK(e3.posterior.count == 3);
  CHECK(e1.posterior.count == 1);
}

TEST_CASE("scalar enrollment matches the quadrature oracle", "[scoring]") {
  PldaModel model = make_model(
      1, SymMatrix::diagonal(std::vector<double>{1.7}),
      SymMatrix::diagonal(std::vector<double>{0.6}));
  const std::vector<std::vector<double>> vectors{{0.9}, {0.9}, {0.9}};
  Enrollment e = plda::enroll(model, vectors);
  oracle::ScalarPosterior quad =
      oracle::quadrature_posterior(1.7, 0.9, 0.6 / 3.0);
  CHECK(std::abs(e.posterior.mean[0] - quad.mean) <= 1e-6);
  CHECK(std::abs(e.posterior.covariance(0, 0) - quad.variance) <= 1e-6);
}

TEST_CASE("empty enrollment is rejected", "[scoring]") {
  PldaModel model =
      make_model(2, SymMatrix::identity(2), SymMatrix::identity(2));
  CHECK_THROWS_AS(plda::enroll(model, std::vector<std::vector<double>>{}),
                  plda::EmptyEnrollment);
}

TEST_CASE("mismatched vector length is rejected", "[scoring]") {
  PldaModel model =
      make_model(2, SymMatrix::identity(2), SymMatrix::identity(2));
  const std::vector<std::vector<double>> vectors{{1.0}};
  CHECK_THROWS_AS(plda::enroll(model, vectors), plda::DimensionMismatch);
}

TEST_CASE("no between-class variability means no information", "[scoring]") {
  const int d = 3;
  SymMatrix tiny = SymMatrix::identity(d);
  tiny.scale(1e-10);
  PldaModel model = make_model(d, tiny, SymMatrix::identity(d));
  plda::NormalSampler rng(71);
  std::vector<double> enroll_vec(d), test_vec(d);
  rng.fill_normal(enroll_vec);
  rng.fill_normal(test_vec);
  Enrollment e = plda::enroll(
      model, std::vector<std::vector<double>>{enroll_vec});
  CHECK(std::abs(plda::score_llr(model, e, test_vec)) <= 1e-6);
}

TEST_CASE("scalar trial matches hand arithmetic", "[scoring]") {
  PldaModel model = make_model(1, SymMatrix::identity(1),
                               SymMatrix::identity(1));
  const std::vector<std::vector<double>> vectors{{2.0}};
  Enrollment e = plda::enroll(model, vectors);
  CHECK(e.posterior.mean[0] == Catch::Approx(1.0).margin(1e-14));
  CHECK(e.posterior.covariance(0, 0) == Catch::Approx(0.5).margin(1e-14));
  // log N(2; 1, 1.5) - log N(2; 0, 2), by scalar density arithmetic.
  const double llr = plda::score_llr(model, e, std::vector<double>{2.0});
  CHECK(llr == Catch::Approx(0.81050770289255714).margin(1e-12));
}

TEST_CASE("same-class trials out-score different-class trials", "[scoring]") {
  const int d = 8;
  SymMatrix between = SymMatrix::identity(d);
  between.scale(4.0);
  PldaModel model = make_model(d, between, SymMatrix::identity(d));

  plda::NormalSampler rng(72);
  plda::CholeskyFactor chol_b = plda::cholesky(model.between_var);
  int wins = 0;
  const int trials = 1000;
  std::vector<double> z(d);
  for (int t = 0; t < trials; ++t) {
    rng.fill_normal(z);
    std::vector<double> center_a = chol_b.lower_times(z);
    rng.fill_normal(z);
    std::vector<double> center_b = chol_b.lower_times(z);
    rng.fill_normal(z);
    std::vector<double> enroll_vec = plda::add(center_a, z);
    rng.fill_normal(z);
    std::vector<double> same = plda::add(center_a, z);
    rng.fill_normal(z);
    std::vector<double> diff = plda::add(center_b, z);
    Enrollment e =
        plda::enroll(model, std::vector<std::vector<double>>{enroll_vec});
    if (plda::score_llr(model, e, same) > plda::score_llr(model, e, diff))
      ++wins;
  }
  CHECK(wins >= 950);
}

TEST_CASE("LLR is translation invariant", "[scoring]") {
  plda::NormalSampler rng(73);
  const int d = 3;
  PldaModel model =
      make_model(d, oracle::random_spd(rng, d), oracle::random_spd(rng, d));
  rng.fill_normal(model.mean);
  std::vector<double> enroll_vec(d), test_vec(d), shift(d);
  rng.fill_normal(enroll_vec);
  rng.fill_normal(test_vec);
  rng.fill_normal(shift);

  Enrollment e =
      plda::enroll(model, std::vector<std::vector<double>>{enroll_vec});
  const double base = plda::score_llr(model, e, test_vec);

  PldaModel shifted = model;
  shifted.mean = plda::add(model.mean, shift);
  Enrollment e2 = plda::enroll(
      shifted,
      std::vector<std::vector<double>>{plda::add(enroll_vec, shift)});
  const double moved =
      plda::score_llr(shifted, e2, plda::add(test_vec, shift));
  CHECK(moved == Catch::Approx(base).margin(1e-8));
}

TEST_CASE("large enrollments converge to the known-center score",
          "[scoring]") {
  plda::NormalSampler rng(74);
  const int d = 2;
  PldaModel model =
      make_model(d, oracle::random_spd(rng, d), oracle::random_spd(rng, d));
  std::vector<double> v(d), test_vec(d);
  rng.fill_normal(v);
  rng.fill_normal(test_vec);

  const std::vector<std::vector<double>> many(100000, v);
  Enrollment e = plda::enroll(model, many);
  const double llr = plda::score_llr(model, e, test_vec);

  // Limit: posterior covariance vanishes and the posterior mean becomes
  // the centered enrollment mean itself.
  const double same = plda::log_gaussian(test_vec, v, model.within_var);
  SymMatrix diff_cov = model.between_var;
  diff_cov.add_scaled(model.within_var, 1.0);
  const double different = plda::log_gaussian(
      test_vec, std::vector<double>(d, 0.0), diff_cov);
  CHECK(llr == Catch::Approx(same - different).margin(1e-3));
}

TEST_CASE("expected same-class LLR dominates different-class", "[scoring]") {
  const int d = 8;
  SymMatrix between = SymMatrix::identity(d);
  between.scale(4.0);
  PldaModel model = make_model(d, between, SymMatrix::identity(d));
  plda::NormalSampler rng(75);
  plda::CholeskyFactor chol_b = plda::cholesky(model.between_var);
  double sum_same = 0.0, sum_diff = 0.0;
  const int trials = 400;
  std::vector<double> z(d);
  for (int t = 0; t < trials; ++t) {
    rng.fill_normal(z);
    std::vector<double> center_a = chol_b.lower_times(z);
    rng.fill_normal(z);
    std::vector<double> center_b = chol_b.lower_times(z);
    rng.fill_normal(z);
    std::vector<double> enroll_vec = plda::add(center_a, z);
    rng.fill_normal(z);
    sum_same += plda::score_llr(
        model,
        plda::enroll(model, std::vector<std::vector<double>>{enroll_vec}),
        plda::add(center_a, z));
    rng.fill_normal(z);
    sum_diff += plda::score_llr(
        model,
        plda::enroll(model, std::vector<std::vector<double>>{enroll_vec}),
        plda::add(center_b, z));
  }
  CHECK(sum_same / trials > sum_diff / trials);
}
