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

/// @file correlations.hpp
/// @brief Pair correlations of shifted-lattice counts on the 2-torus, the
/// auxiliary functions G and F_t, and the double sum over denominators.

#include <cstdint>
#include <vector>

#include "mdalab/params.hpp"

namespace mdalab::correlations {

/// Closed rectangle [x0, x1] x [y0, y1].
struct Rect {
  double x0 = 0.0;
  double x1 = 0.0;
  double y0 = 0.0;
  double y1 = 0.0;

  double area() const { return (x1 - x0) * (y1 - y0); }
};

/// Finite union of rectangles with pairwise disjoint interiors.
class BoxSet2 {
 public:
  /// Throws InvalidArgument on an empty list, a degenerate rectangle or
  /// overlapping interiors.
  explicit BoxSet2(std::vector<Rect> rects);
  static BoxSet2 square(double half_side);

  const std::vector<Rect>& rects() const { return rects_; }
  double area() const;
  bool contains(double x, double y) const;
  /// Image under diag(sx, sy), sx, sy > 0.
  BoxSet2 scaled(double sx, double sy) const;
  /// max(|x|, |y|) over the set.
  double sup_norm() const;

 private:
  std::vector<Rect> rects_;
};

/// |(Z^2 + shift) intersected with B|. Only the shift modulo 1 matters.
std::uint64_t count_shifted(const BoxSet2& b, double sx, double sy);

/// Integral over the torus of N_{B1}(q1 x) N_{B2}(q2 x), evaluated exactly as
/// (q1 q2)^-2 times the sum over k in Z^2 of area((q2 B1 - k) meet q1 B2).
/// Requires coprime q1, q2 >= 1.
double correlation_exact(const BoxSet2& b1, const BoxSet2& b2, std::int64_t q1, std::int64_t q2);

/// The same integral by a rank-1 lattice rule with nodes_per_dim^2 nodes.
double correlation_quadrature(const BoxSet2& b1, const BoxSet2& b2, std::int64_t q1,
                              std::int64_t q2, std::uint64_t nodes_per_dim = 2048);

/// G(u) = 1 if max u < 1; max u if min u < 1 <= max u; u1 u2 if min u >= 1.
double aux_G(double u1, double u2);

/// F_t(q) = G(2Mq e^-t1, 2Mq e^-t2) e^-(t1+t2) / q^2.
double aux_Ft(const FlowTime& t, double q, double M);

/// Piecewise form of F_t; agrees with aux_Ft.
double aux_Ft_explicit(const FlowTime& t, double q, double M);

struct BoundCheck {
  double lhs = 0.0;  ///< correlation of the rescaled sets at the reduced pair
  double rhs = 0.0;  ///< F_t(max(q1,q2)/gcd) max(area D1, area D2)
  std::int64_t q1_reduced = 0;
  std::int64_t q2_reduced = 0;
  bool ok = false;
};

/// Correlation of diag(e^-t1, e^-t2) D1 and D2 at (q1, q2) against its bound.
/// Requires t1 <= t2 and D_i inside [-M, M]^2.
BoundCheck correlation_bound_check(const BoxSet2& d1, const BoxSet2& d2, double M,
                                   const FlowTime& t, std::int64_t q1, std::int64_t q2);

/// Integer range [m+1, n] for a sum from real gamma to real delta, where
/// m < gamma <= m+1 and n <= delta < n+1.
struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = -1;
};
IntRange summation_range(double gamma, double delta);

struct DoubleSumReport {
  double value = 0.0;
  double bound = 0.0;  ///< e^-T + (beta-alpha) max(1, ln(beta/alpha)) max(1, T)
  double ratio = 0.0;
  IntRange range;
};

/// Sum of F_t(max(q1,q2)/gcd(q1,q2)) over q1, q2 from alpha e^T to beta e^T,
/// T = t1 + t2, grouped by gcd with coprime pairs counted by Moebius
/// inversion. Requires 0 < alpha < beta <= M, alpha < 1, alpha e^T >= 1, and
/// beta e^T <= cap.
DoubleSumReport double_sum(const FlowTime& t, double alpha, double beta, double M,
                           double cap = 1e5);

/// Direct double loop over all pairs; oracle for double_sum.
double double_sum_direct(const FlowTime& t, double alpha, double beta, double M,
                         double cap = 1e5);

/// Sum of 1/q over summation_range(gamma, delta). Requires 1 <= gamma < delta.
double harmonic_sum(double gamma, double delta);

/// (1/n) sum of the divisors of n.
double divisor_mean(std::uint64_t n);

/// |Z^2 intersected with [-u1, u1] x [-u2, u2]|.
std::uint64_t box_lattice_count(double u1, double u2);

}  // namespace mdalab::correlations
