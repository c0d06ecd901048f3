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

/// @file lattice_heights.hpp
/// @brief Successive-minima style quantities of the flowed lattice
/// a(t) { p + q (x1, x2, r) : p in Z^2 x {0}, q in Z } and its height.

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>

#include "mdalab/errors.hpp"
#include "mdalab/params.hpp"

namespace mdalab::heights {

struct LatticeSpec {
  TargetPoint x;
  double r = 1.0;  ///< third coordinate of the generator; r > 0
};

/// Coefficients of p + q (x1, x2, r).
struct LatticeVector {
  std::int64_t p1 = 0;
  std::int64_t p2 = 0;
  std::int64_t q = 0;
  friend bool operator==(const LatticeVector&, const LatticeVector&) = default;
};

/// Bivector m e1^e2 + w1 e1^f + w2 e2^f in the lattice basis (e1, e2, f).
struct Wedge {
  std::int64_t m = 0;
  std::int64_t w1 = 0;
  std::int64_t w2 = 0;
  friend bool operator==(const Wedge&, const Wedge&) = default;
};

/// Coordinates of a(t) v in R^3.
std::array<double, 3> flowed(const LatticeSpec& spec, const FlowTime& t, const LatticeVector& v);

/// max(e^t1 |p1 + q x1|, e^t2 |p2 + q x2|, r |q| e^-(t1+t2)).
double vector_norm(const LatticeSpec& spec, const FlowTime& t, const LatticeVector& v);

/// max(e^(t1+t2) |m + w1 x2 - w2 x1|, r e^-t2 |w1|, r e^-t1 |w2|).
double wedge_norm(const LatticeSpec& spec, const FlowTime& t, const Wedge& w);

struct S1Result {
  double value = 0.0;
  LatticeVector witness;
};

struct S2Result {
  double value = 0.0;
  Wedge witness;
};

/// Smallest sup-norm of a nonzero flowed lattice vector. Ties resolve to the
/// lexicographically smallest (|q|, p1, p2) among sign representatives with
/// q > 0, or q = 0 and the first nonzero p_i positive. Throws CapExceeded
/// after `cap` candidate denominators.
S1Result s1(const LatticeSpec& spec, const FlowTime& t, std::uint64_t cap = 100'000'000);

/// Smallest sup-norm of a nonzero element of the flowed wedge lattice. Every
/// integer bivector is decomposable, so this is the minimum over pairs.
S2Result s2(const LatticeSpec& spec, const FlowTime& t, std::uint64_t cap = 100'000'000);

/// min(e^min(t), r e^-(t1+t2)) for t1, t2 >= 0.
double s1_lower_bound(const FlowTime& t, double r);
/// min(r e^-max(t), e^(t1+t2)) for t1, t2 >= 0. The wedge w = (1, 0) alone
/// gets within e^(t1+t2) dist(x2, Z) of r e^-t2, so e^-min(t) is not a bound.
double s2_lower_bound(const FlowTime& t, double r);
double height_upper_bound(const FlowTime& t, double r);

struct HeightReport {
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
  double ht = 0.0;  ///< 1 / min(s1, s2, s3)
  double upper_bound = 0.0;
  LatticeVector s1_witness;
  Wedge s2_witness;
};

/// Throws CheckFailure if ht exceeds max(e^(t1+t2)/r, e^-min(t)) by more than
/// rounding.
HeightReport height(const LatticeSpec& spec, const FlowTime& t);

Wedge wedge_of(const LatticeVector& u, const LatticeVector& v);

/// A pair (u, v) with wedge_of(u, v) == w. Requires w != 0.
std::pair<LatticeVector, LatticeVector> decompose_wedge(const Wedge& w);

struct BruteForceMinima {
  double s1 = 0.0;
  double s2 = 0.0;
  LatticeVector s1_witness;
  std::array<LatticeVector, 2> s2_pair;
  std::uint64_t vectors = 0;  ///< vectors in the coefficient box
  std::uint64_t pairs = 0;    ///< pairs whose wedge was evaluated
};

/// Minima over nonzero vectors with |p_i|, |q| <= bound, and over pairs of
/// such vectors whose Euclidean flowed lengths are at most 2U/lambda, where U
/// bounds the smallest pair wedge and lambda is the shortest box vector; a
/// Lagrange-reduced basis of the minimizing plane always satisfies this.
/// Wedges are evaluated as cross products of flowed coordinates. Upper bounds
/// for s1 and s2; s1 is exact when its witness fits in the box, s2 when the
/// reduced basis of the minimizing plane does.
BruteForceMinima brute_force_minima(const LatticeSpec& spec, const FlowTime& t, int bound,
                                    std::uint64_t pair_cap = 400'000'000);

/// Number of nonzero flowed lattice points inside `box` satisfying `pred`.
/// Throws CapExceeded after `cap` candidates.
template <class Pred>
std::uint64_t siegel_count(const LatticeSpec& spec, const FlowTime& t, const Box3& box, Pred&& pred,
                           std::uint64_t cap = 1'000'000'000) {
  const double et1 = std::exp(t.t1);
  const double et2 = std::exp(t.t2);
  const double emT = std::exp(-t.sum());
  const double ry = spec.r * emT;
  const double qlo = std::ceil(box.lo.y / ry) - 1.0;
  const double qhi = std::floor(box.hi.y / ry) + 1.0;
  if (qhi - qlo > static_cast<double>(cap)) throw CapExceeded("too many denominators");
  std::uint64_t count = 0;
  std::uint64_t work = 0;
  for (auto q = static_cast<std::int64_t>(qlo); q <= static_cast<std::int64_t>(qhi); ++q) {
    const double qd = static_cast<double>(q);
    const double y = ry * qd;
    if (y < box.lo.y || y > box.hi.y) continue;
    const auto lo1 = static_cast<std::int64_t>(std::ceil(box.lo.x1 / et1 - qd * spec.x.x1)) - 1;
    const auto hi1 = static_cast<std::int64_t>(std::floor(box.hi.x1 / et1 - qd * spec.x.x1)) + 1;
    const auto lo2 = static_cast<std::int64_t>(std::ceil(box.lo.x2 / et2 - qd * spec.x.x2)) - 1;
    const auto hi2 = static_cast<std::int64_t>(std::floor(box.hi.x2 / et2 - qd * spec.x.x2)) + 1;
    work += static_cast<std::uint64_t>((hi1 - lo1 + 1) * (hi2 - lo2 + 1));
    if (work > cap) throw CapExceeded("too many lattice candidates");
    for (std::int64_t p1 = lo1; p1 <= hi1; ++p1) {
      const double u1 = et1 * std::fma(qd, spec.x.x1, static_cast<double>(p1));
      if (u1 < box.lo.x1 || u1 > box.hi.x1) continue;
      for (std::int64_t p2 = lo2; p2 <= hi2; ++p2) {
        if (q == 0 && p1 == 0 && p2 == 0) continue;
        const Point3 pt{u1, et2 * std::fma(qd, spec.x.x2, static_cast<double>(p2)), y};
        if (pt.x2 < box.lo.x2 || pt.x2 > box.hi.x2) continue;
        if (pred(pt)) ++count;
      }
    }
  }
  return count;
}

/// Number of nonzero flowed lattice points in a bounded DomainSet.
std::uint64_t siegel_indicator(const LatticeSpec& spec, const FlowTime& t, const DomainSet& set);

/// Nonzero points of a(t) Lambda_{x,r} in a closed box, counted per q in O(1)
/// instead of enumerating p. Agrees with siegel_count on boxes.
std::uint64_t siegel_box_count(const LatticeSpec& spec, const FlowTime& t, const Box3& box,
                               std::uint64_t cap = 1'000'000'000);

}  // namespace mdalab::heights
