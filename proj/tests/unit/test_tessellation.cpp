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
#include "mdalab/tessellation.hpp"

using namespace mdalab;
using namespace mdalab::tessellation;

namespace {

ParamSchedule sched(double a, double b, double c, double T) {
  ParamSchedule s;
  s.a = a;
  s.b = b;
  s.c = c;
  s.T = T;
  return s;
}

}  // namespace

TEST_CASE("band endpoints and index set") {
  const auto s = sched(0.01, 0.1, 0.4, 1e4);
  const auto b = band(s);
  CHECK(b.alpha == doctest::Approx(std::log(0.16 / (0.1 * std::exp(2.0)))).epsilon(1e-14));
  CHECK(b.beta == doctest::Approx(std::log(1e4 * 0.16 / 0.01)).epsilon(1e-14));
  const auto idx = index_set(s);
  // beta = ln(160000) = 11.98, alpha < 0: sums 0..11.
  CHECK(idx.size() == 78);
  CHECK(idx.front() == Index{0, 0});
  CHECK(idx.back() == Index{11, 0});
  CHECK_THROWS_AS(index_set(sched(0.0, 0.1, 0.4, 1e4)), InvalidArgument);

  CHECK(idx.size() == l1_band_size(b.alpha, b.beta));
}

TEST_CASE("decompose picks the shell of each coordinate") {
  const auto s = sched(0.01, 0.2, 0.4, 1e4);
  const auto top = decompose({0.4, -0.4, 1.0}, s);
  REQUIRE(top.has_value());
  CHECK(*top == Index{0, 0});

  const double c = 0.4;
  const auto mid = decompose({c * std::exp(-1.5), -c * std::exp(-0.2), 2.0}, s);
  REQUIRE(mid.has_value());
  CHECK(*mid == Index{1, 0});

  CHECK_FALSE(decompose({0.0, 0.2, 2.0}, s).has_value());
  CHECK_FALSE(decompose({0.5, 0.2, 2.0}, s).has_value());
  CHECK_FALSE(decompose({0.3, 0.3, 0.5}, s).has_value());
}

TEST_CASE("shell boundaries belong to the inclusive side") {
  const auto s = sched(1e-6, 0.2, 0.4, 1e6);
  for (int k = 0; k < 12; ++k) {
    const double x1 = 0.4 * std::exp(-static_cast<double>(k));
    const double x2 = 0.4;
    const double y = 0.1 / (x1 * x2);
    if (y < 1.0 || y > s.T) continue;
    const auto n = decompose({x1, x2, y}, s);
    REQUIRE(n.has_value());
    CHECK(n->first == k);
    CHECK(in_tile(s, *n, {x1, x2, y}));
  }
}

TEST_CASE("decomposed points lie in their flowed tile and no other") {
  const auto s = sched(0.01, 0.1, 0.4, 1e4);
  const auto idx = index_set(s);
  CounterRng rng(31, 0);
  int checked = 0;
  for (std::uint64_t i = 0; i < 4000; ++i) {
    const double y = std::exp(rng.uniform(i, 0, 0.0, std::log(s.T)));
    const double x1 = 0.4 * std::exp(-rng.uniform(i, 1, 0.0, 8.0));
    const double x2 = rng.uniform(i, 2, 0.05, 1.0) * 0.1 / (x1 * y);
    const Point3 p{x1, -x2, y};
    const auto n = decompose(p, s);
    if (!contains(OmegaSet{s}, p)) {
      CHECK_FALSE(n.has_value());
      continue;
    }
    ++checked;
    REQUIRE(n.has_value());
    const Point3 f = apply_flow({static_cast<double>(n->first), static_cast<double>(n->second)}, p);
    CHECK(contains(DeltaTile{s, n->first, n->second}, f));
    CHECK(contains(tile_inclusion_box(s), f));
    int owners = 0;
    for (const auto& m : idx) owners += in_tile(s, m, p) ? 1 : 0;
    CHECK(owners == 1);
  }
  CHECK(checked > 1000);
}

TEST_CASE("inclusion box") {
  const auto s = sched(0.01, 0.1, 0.4, 1e4);
  const Box3 box = tile_inclusion_box(s);
  CHECK(box.lo.x1 == -0.4);
  CHECK(box.hi.x2 == 0.4);
  CHECK(box.lo.y == doctest::Approx(0.01 / 0.16).epsilon(1e-15));
  CHECK(box.hi.y == doctest::Approx(0.1 * std::exp(2.0) / 0.16).epsilon(1e-15));
}

TEST_CASE("verify_partition passes on admissible schedules") {
  for (const auto& s : {sched(0.01, 0.1, 0.4, 1e4), sched(0.001, 0.2, 0.49, 1e6),
                        sched(0.05, 0.06, 0.3, 50)}) {
    const auto r = verify_partition(s, 5000, 7);
    CHECK(r.violations == 0);
    CHECK(r.points_checked == 5000);
    CHECK(r.tiles == index_set(s).size());
    CHECK(r.failed_check.empty());
    CHECK(r.inclusion_checked > 0);
  }
}

TEST_CASE("verify_partition is reproducible") {
  const auto s = sched(0.01, 0.1, 0.4, 1e4);
  const auto a = verify_partition(s, 2000, 99);
  const auto b = verify_partition(s, 2000, 99);
  CHECK(a.draws == b.draws);
  CHECK(a.inclusion_checked == b.inclusion_checked);
}
