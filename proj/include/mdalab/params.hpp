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

/// @file params.hpp
/// @brief Parameter schedules, flow times, points, and the membership
/// predicates for the basic regions of the counting problem.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mdalab {

/// Shrinking-target schedule (a, b, c) at horizon T, plus the constants of
/// the quantitative regime (zeta, theta1, theta2).
struct ParamSchedule {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double zeta = 1.0;
  double theta1 = 1.0;
  double theta2 = 1.0;
  double T = 1.0;
};

enum class Regime {
  kBasic,   ///< 0 <= a < b, 0 < c < 1/2, T >= 1.
  kThmCnt,  ///< kBasic plus a > 0, zeta*b <= c^2 <= (ln T)^theta2 * b, a >= (ln T)^-theta1.
};

struct Violation {
  std::string inequality;
  std::string detail;
};

/// Lists every violated constraint; an empty result means the schedule is
/// admissible for `regime`. Never throws on numeric input.
std::vector<Violation> validate_schedule(const ParamSchedule& s, Regime regime);

/// Throws InvalidArgument naming the first violated constraint.
void require_schedule(const ParamSchedule& s, Regime regime);

std::string describe(const ParamSchedule& s);

/// Diagonal flow parameter; the flow scales (x1, x2, y) by
/// (e^t1, e^t2, e^-(t1+t2)).
struct FlowTime {
  double t1 = 0.0;
  double t2 = 0.0;

  double sum() const { return t1 + t2; }
  double lower() const { return t1 < t2 ? t1 : t2; }
  double upper() const { return t1 < t2 ? t2 : t1; }
};

/// Largest exponent magnitude accepted before an overflow is reported.
inline constexpr double kMaxFlowExponent = 500.0;

struct Point3 {
  double x1 = 0.0;
  double x2 = 0.0;
  double y = 0.0;
};

/// Throws CapExceeded when any exponent magnitude exceeds `cap`.
Point3 apply_flow(const FlowTime& t, const Point3& p, double cap = kMaxFlowExponent);

/// A point of the torus [0,1)^2.
struct TargetPoint {
  double x1 = 0.0;
  double x2 = 0.0;

  /// Reduces both coordinates into [0,1).
  static TargetPoint reduced(double x1, double x2);
};

/// a < |x1 x2| y <= b, max|x_i| <= c, 1 <= y <= T.
struct OmegaSet {
  ParamSchedule s;
};

/// The normalized tile for index (n1, n2): a < |x1 x2| y <= b,
/// c/e < |x_i| <= c, e^-(n1+n2) <= y <= T e^-(n1+n2).
struct DeltaTile {
  ParamSchedule s;
  int n1 = 0;
  int n2 = 0;
};

/// Thin strip: |x1 x2| y <= a, max|x_i| <= 1/2, 1 <= y <= T.
struct UpsilonSet {
  ParamSchedule s;
};

/// Planar hyperbolic cross: max|x_i| <= 1, |x1 x2| <= gamma. Ignores y.
struct XiSet {
  double gamma = 0.0;
};

/// Closed axis-aligned box.
struct Box3 {
  Point3 lo;
  Point3 hi;
};

using DomainSet = std::variant<OmegaSet, DeltaTile, UpsilonSet, XiSet, Box3>;

bool contains(const DomainSet& set, const Point3& p);

/// Closed box containing the set; empty for XiSet, which is unbounded in y.
std::optional<Box3> bounding_box(const DomainSet& set);

/// Index pairs (n1, n2) in N0^2 with alpha <= n1 + n2 < beta, ordered by
/// n1 + n2 and then by n1. Throws CapExceeded above `cap` elements.
std::vector<std::pair<int, int>> l1_band(double alpha, double beta,
                                         std::size_t cap = 50'000'000);

/// Number of elements of l1_band(alpha, beta) without materializing it.
std::uint64_t l1_band_size(double alpha, double beta);

}  // namespace mdalab
