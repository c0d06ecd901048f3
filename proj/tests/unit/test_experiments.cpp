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
#include <string>

#include "mdalab/errors.hpp"
#include "mdalab/experiments.hpp"
#include "mdalab/volumes.hpp"

using namespace mdalab;
using namespace mdalab::experiments;

namespace {

std::int64_t passed(const ExperimentTable& t) {
  const Cell* c = t.summary_value("passed");
  REQUIRE(c != nullptr);
  return std::get<std::int64_t>(*c);
}

double summary_number(const ExperimentTable& t, const std::string& key) {
  const Cell* c = t.summary_value(key);
  REQUIRE(c != nullptr);
  return std::get<double>(*c);
}

}  // namespace

TEST_CASE("table formatting") {
  ExperimentTable t({"name", "n", "value"});
  t.add_row({std::string("a"), std::int64_t{3}, 0.1});
  CHECK_THROWS_AS(t.add_row({std::int64_t{1}}), InvalidArgument);
  t.set_summary("passed", std::int64_t{1});
  t.metadata().name = "demo";
  t.metadata().seed = 5;
  t.metadata().wall_seconds = 1.5;
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_cell(Cell{std::int64_t{-4}}) == "-4");
  CHECK(t.number(0, "value") == 0.1);
  CHECK(t.column("n") == 1);
  CHECK_THROWS(t.column("missing"));

  const std::string data = t.data_fingerprint();
  CHECK(data.find("name,n,value\na,3,0.10000000000000001\n") != std::string::npos);
  CHECK(data.find("# summary.passed: 1") != std::string::npos);
  CHECK(data.find("wall_seconds") == std::string::npos);
  const std::string csv = t.to_csv();
  CHECK(csv.find("# seed: 5") != std::string::npos);
  CHECK(csv.find("wall_seconds") != std::string::npos);
  const std::string json = t.to_json();
  CHECK(json.find("\"columns\"") != std::string::npos);
  CHECK(json.find("\"summary\"") != std::string::npos);
  CHECK(std::string(version_string()).size() > 0);
}

TEST_CASE("least squares") {
  // y = 1 + 2x exactly.
  const auto b = least_squares({{1, 0}, {1, 1}, {1, 2}, {1, 3}}, {1, 3, 5, 7});
  CHECK(b[0] == doctest::Approx(1.0));
  CHECK(b[1] == doctest::Approx(2.0));
  CHECK_THROWS_AS(least_squares({{1, 1}, {1, 1}}, {1, 2}), InvalidArgument);
  CHECK_THROWS_AS(least_squares({{1, 1}}, {1, 2}), InvalidArgument);
}

TEST_CASE("exact strip mean") {
  double direct = 0.0;
  for (int q = 1; q <= 1000; ++q) direct += volumes::upsilon_section_area(0.02, q);
  CHECK(strip_mean_exact(0.02, 1000) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(strip_mean_exact(0.0, 1000) == 0.0);
}

TEST_CASE("level sets") {
  LevelSetParams p;
  p.n = 4000;
  const auto t = level_set_measure(p, {3, 1});
  CHECK(t.rows().size() == 5);
  for (std::size_t i = 0; i < t.rows().size(); ++i) {
    CHECK(t.number(i, "estimate") >= 0.0);
    CHECK(t.number(i, "bound") > 0.0);
  }
  p.L = {0.5};
  CHECK_THROWS_AS(level_set_measure(p, {}), RegimeError);
  // r = 1/2 uses the r^-2 branch.
  LevelSetParams half;
  half.r = 0.5;
  half.L = {4};
  half.n = 500;
  const auto h = level_set_measure(half, {});
  const double expect = 4.0 * std::pow(4.0, -3.0) + 2.0 * std::pow(4.0, -2.0) * std::exp(-3.0);
  CHECK(h.number(0, "bound") == doctest::Approx(expect));
}

TEST_CASE("height moments") {
  HeightMomentParams p;
  p.n = 500;
  CHECK(passed(height_moment(p, {})) == 1);
  p.weight = MomentWeight::kThetaKappa;
  CHECK(passed(height_moment(p, {})) == 1);
  // Above the largest possible height the level set is empty.
  p.eta = {1e6};
  const auto empty = height_moment(p, {});
  CHECK(empty.number(0, "estimate") == 0.0);
  p.eta = {1.0};
  CHECK_THROWS_AS(height_moment(p, {}), RegimeError);
}

TEST_CASE("L2 Siegel transform of controlled sets") {
  const FlowTime t{4, 4};
  const auto empty = l2_siegel_controlled(example_controlled_set(ControlledShape::kEmpty, 1e-3, 0.1, 2), t,
                                          300, 64, {});
  CHECK(empty.number(0, "estimate") == 0.0);
  const auto sliver = l2_siegel_controlled(
      example_controlled_set(ControlledShape::kSliver, 1e-3, 0.1, 2), t, 300, 64, {});
  CHECK(passed(sliver) == 1);
  CHECK_THROWS_AS(l2_siegel_controlled(example_controlled_set(ControlledShape::kSliver, 1e-3, 0.1, 2),
                                       {0.5, 0.4}, 10, 64, {}),
                  RegimeError);
}

TEST_CASE("thin strips") {
  ThinStripParams p;
  p.T = {1e3, 1e4};
  p.n = 200;
  const auto t = thin_strip(p, {});
  CHECK(t.rows().size() == 2);
  p.a_T = Expression::constant(0.0);
  const auto zero = thin_strip(p, {});
  CHECK(zero.number(0, "nonempty_fraction") == 0.0);
  CHECK(zero.number(1, "mean_count") == 0.0);
  p.a_T = Expression::constant(0.25);
  const auto fat = thin_strip(p, {});
  CHECK(fat.number(0, "nonempty_fraction") > 0.95);
  p.a_T = Expression::parse("log(T)");
  CHECK_THROWS_AS(thin_strip(p, {}), RegimeError);
}

TEST_CASE("asymptotics") {
  AsymptoticsParams p;
  p.T = {1e2, 1e3, 1e4};
  p.n_points = 20;
  const auto t = main_asymptotics(p, {});
  CHECK(t.rows().size() == 3);
  CHECK(summary_number(t, "target_coefficient") == 0.1);
  // b >= T/4: every q qualifies.
  AsymptoticsParams all;
  all.b = 1e4;
  all.T = {10, 100, 1000};
  all.n_points = 5;
  const auto full = main_asymptotics(all, {});
  for (std::size_t i = 0; i < 3; ++i) CHECK(full.number(i, "mean_count") == full.number(i, "T"));
  p.b = 1e-6;
  CHECK_THROWS_AS(main_asymptotics(p, {}), RegimeError);
}

TEST_CASE("equidistribution trend") {
  EquidistParams p;
  p.k_max = 2;
  p.n = 300;
  const auto t = equidistribution_trend(p, {});
  CHECK(t.rows().size() == 3);
  CHECK(t.number(0, "volume") == 4.0);
  // At k = 0 each plane y = q in {1, 2} meets the box in exactly 2 x 2 points
  // for irrational x.
  CHECK(t.number(0, "mean_count") == 8.0);
  CHECK(t.number(0, "std_error") == 0.0);
}

TEST_CASE("results do not depend on the thread count") {
  for (const auto& name : experiment_names()) {
    ConfigSection small(name, {});
    if (name == "levelset" || name == "heightmoment" || name == "l2siegel" || name == "equidist") {
      small.set("n", "600");
      if (name == "heightmoment") {
        // Lower threshold and flow so that hits occur at this sample size.
        small.set("n", "4000");
        small.set("t1", "1.5");
        small.set("t2", "1.5");
        small.set("rho", "0.9");
        small.set("eta", "8.5, 12");
      }
    } else if (name == "thinstrip") {
      small.set("n", "300");
      small.set("T", "1000, 10000");
    } else if (name == "asymptotics") {
      small.set("n", "10");
      small.set("T", "100, 1000, 10000");
    }
    const auto one = run_experiment(name, small, {7, 1});
    const auto four = run_experiment(name, small, {7, 4});
    CHECK(one.data_fingerprint() == four.data_fingerprint());
    CHECK(one.metadata().threads == 1);
    CHECK(four.metadata().threads == 4);
    CHECK(one.metadata().name == name);
    const auto other = run_experiment(name, small, {8, 1});
    if (name != "l2siegel") CHECK(one.data_fingerprint() != other.data_fingerprint());
  }
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(run_experiment("nope", ConfigSection("nope", {}), {}), ConfigError);
  CHECK_THROWS_AS(run_experiment("levelset", ConfigSection("levelset", {{"bogus", "1"}}), {}), ConfigError);
  CHECK_THROWS_AS(run_experiment("levelset", ConfigSection("levelset", {{"n", "abc"}}), {}), ConfigError);
  CHECK_THROWS_AS(run_experiment("heightmoment", ConfigSection("heightmoment", {{"weight", "cube"}}), {}),
                  ConfigError);
}
