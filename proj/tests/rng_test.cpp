// tests/rng_test.cpp

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
#include "plda/rng.hpp"

TEST_CASE("inverse normal CDF matches reference quantiles", "[rng]") {
  // Reference values from an independent high-precision implementation.
  CHECK(plda::inverse_normal_cdf(0.5) == 0.0);
  CHECK(plda::inverse_normal_cdf(0.975) ==
        Catch::Approx(1.959963984540054).epsilon(1e-14));
  CHECK(plda::inverse_normal_cdf(0.9) ==
        Catch::Approx(1.2815515655446004).epsilon(1e-14));
  CHECK(plda::inverse_normal_cdf(0.025) ==
        Catch::Approx(-1.9599639845400545).epsilon(1e-14));
  CHECK(plda::inverse_normal_cdf(0.001) ==
        Catch::Approx(-3.0902323061678132).epsilon(1e-14));
  CHECK(plda::inverse_normal_cdf(1e-10) ==
        Catch::Approx(-6.3613409024040557).epsilon(1e-13));
  CHECK(plda::inverse_normal_cdf(0.999999999999) ==
        Catch::Approx(7.0344869100478356).epsilon(1e-12));
  CHECK(plda::inverse_normal_cdf(0.3) ==
        Catch::Approx(-0.52440051270804089).epsilon(1e-14));
}

TEST_CASE("inverse normal CDF is antisymmetric", "[rng]") {
  for (double p : {0.01, 0.1, 0.25, 0.4, 0.49}) {
    CHECK(plda::inverse_normal_cdf(p) ==
          Catch::Approx(-plda::inverse_normal_cdf(1.0 - p)).epsilon(1e-12));
  }
}

TEST_CASE("inverse normal CDF rejects p outside (0,1)", "[rng]") {
  CHECK_THROWS_AS(plda::inverse_normal_cdf(0.0), plda::InvalidArgument);
  CHECK_THROWS_AS(plda::inverse_normal_cdf(1.0), plda::InvalidArgument);
  CHECK_THROWS_AS(plda::inverse_normal_cdf(-0.2), plda::InvalidArgument);
}

TEST_CASE("same seed gives an identical stream", "[rng]") {
  plda::NormalSampler a(123), b(123), c(124);
  bool all_equal = true, any_differ = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.normal();
    all_equal = all_equal && x == b.normal();
    any_differ = any_differ || x != c.normal();
  }
  CHECK(all_equal);
  CHECK(any_differ);
}

TEST_CASE("stream moments look standard normal", "[rng]") {
  plda::NormalSampler rng(9);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}
