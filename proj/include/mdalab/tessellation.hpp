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

#pragma once

/// @file tessellation.hpp
/// @brief Decomposition of the counting region into flowed copies of
/// normalized tiles indexed by (n1, n2).

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mdalab/params.hpp"

namespace mdalab::tessellation {

using Index = std::pair<int, int>;

/// Index band alpha <= n1 + n2 < beta with alpha = ln(c^2/(b e^2)) and
/// beta = ln(T c^2 / a). Requires a kBasic schedule with a > 0.
struct Band {
  double alpha = 0.0;
  double beta = 0.0;
};
Band band(const ParamSchedule& s);

/// Non-negative indices in the band, ordered by n1 + n2 then n1.
std::vector<Index> index_set(const ParamSchedule& s);

/// True when the flowed point a(n) p lies in the normalized tile for n. The
/// inequalities are evaluated before flowing, against thresholds c e^-k, so
/// that boundary points belong to exactly one tile in floating point.
bool in_tile(const ParamSchedule& s, const Index& n, const Point3& p);

/// Shell index (n1, n2) with c e^-(n_i+1) < |x_i| <= c e^-n_i, so that the
/// flowed point lies in the tile. Empty when p is outside the region.
std::optional<Index> decompose(const Point3& p, const ParamSchedule& s);

/// Box [-c,c]^2 x (a/c^2, b e^2/c^2] containing every tile.
Box3 tile_inclusion_box(const ParamSchedule& s);

struct PartitionReport {
  std::uint64_t draws = 0;              ///< sampler attempts
  std::uint64_t points_checked = 0;     ///< region points checked
  std::uint64_t tiles = 0;              ///< size of the index band
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t inclusion_checked = 0;  ///< tile points tested against the box
  std::uint64_t empty_band_trials = 0;  ///< rejection trials outside the band
  std::uint64_t violations = 0;
  std::string failed_check;
  std::optional<Point3> witness;
  std::optional<Index> witness_index;
};

/// Samples `points` points of the region (spread over all shells, with some
/// placed exactly on shell boundaries) and checks that decompose succeeds inside the band and that exactly
/// one tile holds the flowed point (all band indices when the band has at
/// most `exhaustive_limit` elements, otherwise 8 random others). Then checks
/// the inclusion box on sampled tile points and that tiles just outside the
/// band are empty. Stops at the first failure.
PartitionReport verify_partition(const ParamSchedule& s, std::uint64_t points, std::uint64_t seed,
                                 std::size_t exhaustive_limit = 4096,
                                 std::uint64_t empty_trials = 10000);

}  // namespace mdalab::tessellation
