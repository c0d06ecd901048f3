// Copyright 2026 The mdalab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mdalab/errors.hpp"
#include "mdalab/rng.hpp"
#include "mdalab/schmidt.hpp"

using namespace mdalab;
using namespace mdalab::schmidt;

TEST_CASE("theta") {
  CHECK(theta(1.0, 0.0) == 0.0);
  CHECK(theta(1.0, 1.0) == doctest::Approx(1.0 / std::pow(std::log(std::exp(1.0) + 1.0), 2)).epsilon(1e-15));
  CHECK(theta(1.0, 1.0) == doctest::Approx(0.5798).epsilon(1e-4));
  CHECK(theta(0.5, -3.0) == theta(0.5, 3.0));
  CounterRng rng(71, 0);
  for (std::uint64_t i = 0; i < 5000; ++i) {
    const double k = rng.uniform(i, 0, 0.01, 2.0);
    const double t = std::exp(rng.uniform(i, 1, -10.0, 30.0));
    CHECK(theta(k, t) <= t * t);
  }
}

TEST_CASE("theta is convex only for kappa up to about 1.875") {
  auto second_difference = [](double k, double t) {
    const double h = 1e-3;
    return (theta(k, t + h) - 2.0 * theta(k, t) + theta(k, t - h)) / (h * h);
  };
  for (double k : {0.1, 1.0, 1.8, 1.87}) {
    for (double t = 0.01; t < 50.0; t += 0.01) CHECK(second_difference(k, t) >= 0.0);
  }
  CHECK(second_difference(1.9, 2.6) < 0.0);
  CHECK(second_difference(2.0, 2.4) < 0.0);
}

TEST_CASE("theta inverse") {
  CHECK(theta_inverse(1.0, 0.0) == 0.0);
  for (double k : {0.1, 1.0, 2.0}) {
    for (double u = 1e-6; u < 1e12; u *= 3.7) {
      const double t = theta_inverse(k, u);
      CHECK(theta(k, t) >= u * (1 - 1e-12));
      CHECK(theta(k, t * (1 - 1e-9)) <= u * (1 + 1e-12));
    }
  }
  CHECK_THROWS_AS(theta_inverse(2.5, 1.0), InvalidArgument);
  CHECK_THROWS_AS(theta_inverse(0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(theta_inverse(1.0, -1.0), InvalidArgument);
  CHECK(log_plus(0.5) == 1.0);
  CHECK(log_plus(std::exp(3.0)) == doctest::Approx(3.0));
}

TEST_CASE("dyadic family and covers") {
  CHECK(dyadic_cover(1, 1) == std::vector<DyadicInterval>{{0, 0}});
  CHECK(dyadic_cover(5, 3) == std::vector<DyadicInterval>{{2, 0}, {0, 4}});
  for (int s = 1; s <= 12; ++s) {
    CHECK(dyadic_cover((std::uint64_t{1} << s) - 1, s).size() == static_cast<std::size_t>(s));
  }
  CHECK_THROWS_AS(dyadic_cover(0, 3), InvalidArgument);
  CHECK_THROWS_AS(dyadic_cover(8, 3), InvalidArgument);

  CHECK(dyadic_family(3).size() == 11);
  CHECK(in_dyadic_family(3, {2, 0}));
  CHECK_FALSE(in_dyadic_family(3, {2, 1}));
  CHECK_FALSE(in_dyadic_family(3, {3, 0}));
  CHECK(DyadicInterval{2, 3}.lo() == 12);
  CHECK(DyadicInterval{2, 3}.hi() == 16);

  const auto check = verify_covers(12);
  CHECK(check.failures == 0);
  CHECK_FALSE(check.witness.has_value());
  CHECK(check.covers_checked == (std::uint64_t{1} << 13) - 2 - 12);
  CHECK(check.max_annulus_ratio <= 16.0);
}

TEST_CASE("annuli") {
  CHECK(annulus(0, 3) == std::vector<std::pair<int, int>>{{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {2, 0}});
  CHECK(annulus(2, 2).empty());
  CHECK(annulus(10, 11).size() == 11);
  CHECK(annulus_size(10, 11) == 11);
  CHECK_THROWS_AS(annulus(-1, 2), InvalidArgument);
  for (int k = 0; k < 40; ++k) {
    for (int l = 0; l < 40; ++l) {
      CHECK(annulus_size(k, k + l) <= 4u * static_cast<unsigned>(l * l + k * l + 1));
    }
  }
  for (int s = 1; s <= 12; ++s) {
    std::uint64_t total = 0;
    for (const auto& d : dyadic_family(s)) total += annulus_size(double(d.lo()), double(d.hi()));
    CHECK(dyadic_annulus_total(s) == total);
    CHECK(static_cast<double>(total) <= 16.0 * s * std::pow(4.0, s));
  }
}

TEST_CASE("moment pipeline on a zero family") {
  const auto r = moment_pipeline(zero_family(64, 256), 1.0, 0.5);
  CHECK(r.D_T == 0.0);
  CHECK(r.violations == 0);
  CHECK(r.s_T == 7);
  for (const auto& row : r.rows) CHECK(row.measure == 0.0);
}

TEST_CASE("moment pipeline on independent signs") {
  const auto fam = iid_sign_family(64, 1024, 5);
  CHECK(fam.values.size() == annulus_size(0, 64) * 1024);
  const auto r = moment_pipeline(fam, 1.0, 0.5);
  CHECK(r.hypothesis_ok);
  CHECK(r.D_T > 0.0);
  CHECK(r.violations == 0);
  REQUIRE(r.rows.size() == 6);
  for (const auto& row : r.rows) {
    CHECK(row.measure <= row.chebyshev_bound + 1e-12);
    CHECK(row.measure <= row.explicit_bound);
    CHECK(row.conclusion_violations == 0);
  }

  const auto declared = moment_pipeline(fam, 1.0, 0.5, r.D_T * 0.5);
  CHECK_FALSE(declared.hypothesis_ok);
  CHECK(declared.hypothesis_witness.has_value());
}

TEST_CASE("moment pipeline on an aligned family") {
  const auto fam = aligned_family(64, 512, 20, 24, 9);
  const auto r = moment_pipeline(fam, 1.0, 0.5);
  const auto iid = moment_pipeline(iid_sign_family(64, 512, 9), 1.0, 0.5);
  CHECK(r.D_T > iid.D_T);
  CHECK(r.violations == 0);
}
