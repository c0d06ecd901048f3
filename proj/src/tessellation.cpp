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

#include "mdalab/tessellation.hpp"

#include <algorithm>
#include <cmath>

#include "mdalab/errors.hpp"
#include "mdalab/rng.hpp"

namespace mdalab::tessellation {
namespace {

void require_tessellation(const ParamSchedule& s) {
  require_schedule(s, Regime::kBasic);
  if (!(s.a > 0.0)) throw InvalidArgument("tessellation needs a > 0");
}

// c e^-n as one double shared by shells n - 1 and n, so adjacent shells meet
// at a single representable boundary.
double shell_threshold(double c, int n) { return c * std::exp(-static_cast<double>(n)); }

bool in_shell(double ax, double c, int n) {
  return shell_threshold(c, n + 1) < ax && ax <= shell_threshold(c, n);
}

// Log-space guess corrected by the threshold comparison.
std::optional<int> shell_index(double ax, double c) {
  if (!(ax > 0.0) || ax > c) return std::nullopt;
  int n = std::max(0, static_cast<int>(std::floor(std::log(c / ax) + 1e-12)));
  while (n > 0 && ax > shell_threshold(c, n)) --n;
  while (!(shell_threshold(c, n + 1) < ax)) ++n;
  return n;
}

}  // namespace

Band band(const ParamSchedule& s) {
  require_tessellation(s);
  const double c2 = s.c * s.c;
  return {std::log(c2 / (s.b * std::exp(2.0))), std::log(s.T * c2 / s.a)};
}

std::vector<Index> index_set(const ParamSchedule& s) {
  const Band bd = band(s);
  return l1_band(bd.alpha, bd.beta);
}

bool in_tile(const ParamSchedule& s, const Index& n, const Point3& p) {
  // a(n) scales x_i by e^n_i and y by e^-(n1+n2), so the product is unchanged
  // and 1 <= y <= T is the flowed y condition.
  if (n.first < 0 || n.second < 0) return false;
  const double prod = std::abs(p.x1 * p.x2) * p.y;
  return s.a < prod && prod <= s.b && 1.0 <= p.y && p.y <= s.T &&
         in_shell(std::abs(p.x1), s.c, n.first) && in_shell(std::abs(p.x2), s.c, n.second);
}

std::optional<Index> decompose(const Point3& p, const ParamSchedule& s) {
  require_tessellation(s);
  if (!contains(OmegaSet{s}, p)) return std::nullopt;
  const auto n1 = shell_index(std::abs(p.x1), s.c);
  const auto n2 = shell_index(std::abs(p.x2), s.c);
  if (!n1 || !n2) return std::nullopt;
  return Index{*n1, *n2};
}

Box3 tile_inclusion_box(const ParamSchedule& s) {
  require_tessellation(s);
  const double c2 = s.c * s.c;
  return {{-s.c, -s.c, s.a / c2}, {s.c, s.c, s.b * std::exp(2.0) / c2}};
}

PartitionReport verify_partition(const ParamSchedule& s, std::uint64_t points, std::uint64_t seed,
                                 std::size_t exhaustive_limit, std::uint64_t empty_trials) {
  require_tessellation(s);
  PartitionReport r;
  const Band bd = band(s);
  r.alpha = bd.alpha;
  r.beta = bd.beta;
  const auto tiles = index_set(s);
  r.tiles = tiles.size();
  const bool exhaustive = tiles.size() <= exhaustive_limit;
  const CounterRng rng(seed, stream_id("tessellation.verify"));
  const DomainSet omega = OmegaSet{s};

  auto fail = [&r](const char* what, const Point3& p, std::optional<Index> n) {
    ++r.violations;
    r.failed_check = what;
    r.witness = p;
    r.witness_index = n;
    return r;
  };

  // Constructive draws inside the region: y and |x1| log-uniform, |x2| log-uniform
  // on its admissible interval. Every 16th point has |x1| snapped onto a shell
  // boundary c e^-k.
  const double x_floor = std::max(s.a, 1e-300) / (s.c * s.T);
  auto draw = [&](std::uint64_t j) -> std::optional<Point3> {
    const double y = std::exp(rng.uniform(j, 0, 0.0, std::log(s.T)));
    double a1 = std::exp(rng.uniform(j, 1, std::log(x_floor), std::log(s.c)));
    if (j % 16 == 15) a1 = s.c * std::exp(-std::round(std::log(s.c / a1)));
    const double lo2 = s.a / (a1 * y);
    const double hi2 = std::min(s.c, s.b / (a1 * y));
    if (!(lo2 < hi2)) return std::nullopt;
    const double a2 = lo2 > 0.0 ? std::exp(rng.uniform(j, 2, std::log(lo2), std::log(hi2)))
                                : rng.uniform(j, 2, 0.0, hi2);
    const double sg1 = (rng.bits(j, 5) & 1) ? -1.0 : 1.0;
    const double sg2 = (rng.bits(j, 6) & 1) ? -1.0 : 1.0;
    return Point3{sg1 * a1, sg2 * a2, y};
  };
  const std::uint64_t max_attempts = 64 * points + 1024;
  for (std::uint64_t i = 0, j = 0; i < points && j < max_attempts; ++j) {
    ++r.draws;
    const auto drawn = draw(j);
    if (!drawn || !contains(omega, *drawn)) continue;
    const Point3 p = *drawn;
    ++i;
    ++r.points_checked;
    const auto m = decompose(p, s);
    if (!m) return fail("decompose found no shell", p, std::nullopt);
    const int level = m->first + m->second;
    if (!(bd.alpha <= level && level < bd.beta)) return fail("index outside band", p, m);
    if (!in_tile(s, *m, p)) return fail("flowed point not in its tile", p, m);
    if (exhaustive) {
      for (const auto& n : tiles) {
        if (n != *m && in_tile(s, n, p)) return fail("point in two tiles", p, n);
      }
    } else {
      for (std::uint32_t k = 0; k < 8; ++k) {
        const auto pick = static_cast<std::size_t>(rng.bits(j, 8 + k) % tiles.size());
        if (tiles[pick] != *m && in_tile(s, tiles[pick], p)) {
          return fail("point in two tiles", p, tiles[pick]);
        }
      }
    }
  }

  // Inclusion box, on points constructed inside each tile.
  const Box3 box = tile_inclusion_box(s);
  const double lo = s.c * std::exp(-1.0);
  const CounterRng inc = rng.derive(1);
  const std::size_t tile_cap = std::min<std::size_t>(tiles.size(), exhaustive_limit);
  for (std::size_t t = 0; t < tile_cap; ++t) {
    const auto& n = tiles[t];
    const double shrink = std::exp(-static_cast<double>(n.first + n.second));
    for (std::uint32_t k = 0; k < 16; ++k) {
      const std::uint64_t idx = t * 16 + k;
      const double x1 = inc.uniform(idx, 0, lo, s.c) * (inc.uniform(idx, 1) < 0.5 ? -1.0 : 1.0);
      const double x2 = inc.uniform(idx, 2, lo, s.c) * (inc.uniform(idx, 3) < 0.5 ? -1.0 : 1.0);
      const double pr = std::abs(x1 * x2);
      const double ylo = std::max(shrink, s.a / pr);
      const double yhi = std::min(s.T * shrink, s.b / pr);
      if (!(ylo < yhi)) continue;
      const Point3 p{x1, x2, inc.uniform(idx, 4, ylo, yhi)};
      if (!contains(DeltaTile{s, n.first, n.second}, p)) continue;
      ++r.inclusion_checked;
      if (!contains(DomainSet{box}, p)) return fail("tile point outside inclusion box", p, n);
    }
  }

  // Tiles whose level lies just outside the band must be empty.
  const CounterRng emp = rng.derive(2);
  std::vector<int> levels;
  for (int d = 1; d <= 3; ++d) {
    const int below = static_cast<int>(std::ceil(bd.alpha)) - d;
    if (below >= 0) levels.push_back(below);
    levels.push_back(static_cast<int>(std::ceil(bd.beta)) - 1 + d);
  }
  std::uint64_t idx = 0;
  for (int level : levels) {
    for (int n1 = 0; n1 <= level; n1 += std::max(1, level / 4)) {
      const Index n{n1, level - n1};
      const double shrink = std::exp(-static_cast<double>(level));
      for (std::uint64_t k = 0; k < empty_trials; ++k, ++idx) {
        ++r.empty_band_trials;
        const double sg1 = emp.uniform(idx, 3) < 0.5 ? -1.0 : 1.0;
        const double sg2 = emp.uniform(idx, 4) < 0.5 ? -1.0 : 1.0;
        const Point3 p{sg1 * emp.uniform(idx, 0, lo, s.c), sg2 * emp.uniform(idx, 1, lo, s.c),
                       emp.uniform(idx, 2, shrink, s.T * shrink)};
        if (contains(DeltaTile{s, n.first, n.second}, p)) {
          return fail("tile outside the band is nonempty", p, n);
        }
      }
    }
  }
  return r;
}

}  // namespace mdalab::tessellation
