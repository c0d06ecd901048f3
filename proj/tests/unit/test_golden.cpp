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

// Numeric summaries of reduced experiment runs against frozen values.
// MDALAB_REGEN_GOLDEN=1 rewrites the golden file instead of comparing.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "mdalab/experiments.hpp"

using namespace mdalab;

namespace {

// Summaries are deterministic; the slack only absorbs libm differences.
constexpr double kRelTol = 1e-9;
constexpr double kAbsTol = 1e-12;

const std::map<std::string, std::map<std::string, std::string>>& configs() {
  static const std::map<std::string, std::map<std::string, std::string>> c = {
      {"levelset", {{"n", "3000"}}},
      {"heightmoment", {{"n", "2000"}}},
      {"l2siegel", {{"n", "2000"}}},
      {"thinstrip", {{"n", "300"}, {"T", "1e3, 1e4"}}},
      {"asymptotics", {{"n", "40"}, {"T", "1e2, 1e3, 1e4, 1e5"}}},
      {"equidist", {{"n", "1000"}, {"k_max", "3"}}},
  };
  return c;
}

std::map<std::string, double> current() {
  std::map<std::string, double> out;
  for (const auto& [name, params] : configs()) {
    const auto t = experiments::run_experiment(name, ConfigSection(name, params), {7, 2});
    for (const auto& [key, cell] : t.summary()) {
      if (const double* v = std::get_if<double>(&cell)) out[name + "." + key] = *v;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("experiment summaries match the golden file") {
  const std::string path = std::string(MDALAB_GOLDEN_DIR) + "/summaries.txt";
  const auto got = current();
  REQUIRE(!got.empty());
  if (const char* regen = std::getenv("MDALAB_REGEN_GOLDEN"); regen && std::string(regen) == "1") {
    std::ofstream f(path);
    REQUIRE(f.good());
    f.precision(17);
    for (const auto& [key, v] : got) f << key << ' ' << v << '\n';
    return;
  }
  std::ifstream f(path);
  REQUIRE_MESSAGE(f.good(), "missing " << path);
  std::map<std::string, double> want;
  std::string line;
  while (std::getline(f, line)) {
    std::istringstream ls(line);
    std::string key;
    std::string value;
    if (ls >> key >> value) want[key] = std::strtod(value.c_str(), nullptr);
  }
  CHECK(want.size() == got.size());
  for (const auto& [key, expected] : want) {
    INFO(key);
    const auto it = got.find(key);
    REQUIRE(it != got.end());
    if (std::isnan(expected)) {
      CHECK(std::isnan(it->second));
    } else {
      CHECK(std::abs(it->second - expected) <= kAbsTol + kRelTol * std::abs(expected));
    }
  }
}
