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

/// @file counting.hpp
/// @brief Exact counts of denominators q <= T satisfying multiplicative
/// approximation conditions, and the matching lattice-point enumeration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "mdalab/params.hpp"
#include "mdalab/volumes.hpp"

namespace mdalab::counting {

/// Fractional part of q*x with one rounding error (fma residual correction).
inline double frac_of_product(std::uint64_t q, double x) {
  const double qd = static_cast<double>(q);
  const double p = qd * x;
  const double e = std::fma(qd, x, -p);
  double f = (p - std::floor(p)) + e;
  if (f < 0.0) f += 1.0;
  if (f >= 1.0) f -= 1.0;
  return f;
}

inline double dist_to_nearest_int(double v) {
  const double f = v - std::floor(v);
  return std::min(f, 1.0 - f);
}

/// Renormalization period of the incremental fractional-part accumulation.
inline constexpr std::uint64_t kRenormPeriod = std::uint64_t{1} << 16;

/// Calls visit(q, |q x1|, |q x2|) for q = 1..qmax, where |.| is the distance
/// to the nearest integer. Fractional parts are accumulated incrementally in
/// four interleaved lanes and recomputed exactly every kRenormPeriod steps.
template <class Visit>
void scan_denominators(const TargetPoint& x, std::uint64_t qmax, Visit&& visit) {
  constexpr int kLanes = 4;
  const double step1 = frac_of_product(kLanes, x.x1);
  const double step2 = frac_of_product(kLanes, x.x2);
  double f1[kLanes] = {};
  double f2[kLanes] = {};
  std::uint64_t base = 1;
  for (; base + kLanes - 1 <= qmax; base += kLanes) {
    if ((base - 1) % kRenormPeriod == 0) {
      for (int k = 0; k < kLanes; ++k) {
        f1[k] = frac_of_product(base + k, x.x1);
        f2[k] = frac_of_product(base + k, x.x2);
      }
    } else {
      for (int k = 0; k < kLanes; ++k) {
        f1[k] += step1;
        f1[k] -= static_cast<double>(f1[k] >= 1.0);
        f2[k] += step2;
        f2[k] -= static_cast<double>(f2[k] >= 1.0);
      }
    }
    for (int k = 0; k < kLanes; ++k) {
      visit(base + k, std::min(f1[k], 1.0 - f1[k]), std::min(f2[k], 1.0 - f2[k]));
    }
  }
  const std::uint64_t rest = qmax >= base ? qmax - base + 1 : 0;
  for (std::uint64_t k = 0; k < rest; ++k) {
    const std::uint64_t q = base + k;
    const double g1 = frac_of_product(q, x.x1);
    const double g2 = frac_of_product(q, x.x2);
    visit(q, std::min(g1, 1.0 - g1), std::min(g2, 1.0 - g2));
  }
}

struct CountOptions {
  /// Record the hit denominators; defaults to T <= 1e6.
  std::optional<bool> retain_hits;
  /// Largest accepted T.
  double cap = 1e9;
};

struct CountReport {
  std::uint64_t count = 0;
  double weighted_sum = 0.0;
  double T = 0.0;
  ParamSchedule s;
  std::optional<std::vector<std::uint64_t>> q_hits;
  std::uint64_t elapsed_ns = 0;
};

/// #{1 <= q <= T : a < q|qx1||qx2| <= b, |qx_i| <= c}. Requires an admissible
/// kBasic schedule; a = 0 drops the lower constraint. If `h` is given the
/// report also carries the sum of h(q/T) over hits.
CountReport count_Q(const TargetPoint& x, const ParamSchedule& s, const CountOptions& opt = {},
                    const volumes::Weight* h = nullptr);

/// #{1 <= q <= T : q|qx1||qx2| <= b}.
CountReport count_L(const TargetPoint& x, double b, double T, const CountOptions& opt = {});

/// #{1 <= q <= T : |qx1||qx2| <= b}.
CountReport count_N_widmer(const TargetPoint& x, double b, double T,
                           const CountOptions& opt = {});

/// Sum of h(q/T) over the denominators counted by count_Q.
double weighted_sum(const TargetPoint& x, const ParamSchedule& s, const volumes::Weight& h);

/// For every j, #{1 <= q <= T[j] : q|qx1||qx2| <= b[j]} from a single pass.
/// T must be non-decreasing.
std::vector<std::uint64_t> count_L_multi(const TargetPoint& x, const std::vector<double>& T,
                                         const std::vector<double>& b);

struct LatticePoint {
  std::int64_t p1 = 0;
  std::int64_t p2 = 0;
  std::int64_t q = 0;

  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
};

/// Points p + q(x1, x2) of the unimodular lattice in an OmegaSet or
/// UpsilonSet, sorted by (q, p1, p2). Coordinates are p_i + q x_i, y = q.
std::vector<LatticePoint> lattice_points_in(const DomainSet& set, const TargetPoint& x);

}  // namespace mdalab::counting
