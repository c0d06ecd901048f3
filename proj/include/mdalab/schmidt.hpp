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

/// @file schmidt.hpp
/// @brief Dyadic covers of [0, N), l1 annuli of indices, the weight
/// theta_k(t) = t^2 / ln(e + |t|)^(1+k), and a moment-to-pointwise pipeline
/// run on a finite probability space.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace mdalab::schmidt {

double theta(double kappa, double t);

/// Smallest t >= 0 with theta(kappa, t) >= u, by bisection. Requires u >= 0
/// and 0 < kappa <= 2 (where theta is increasing on [0, inf)).
double theta_inverse(double kappa, double u);

/// ln max(e, u).
double log_plus(double u);

/// [2^i j, 2^i (j+1)).
struct DyadicInterval {
  int i = 0;
  std::int64_t j = 0;

  std::int64_t lo() const { return (std::int64_t{1} << i) * j; }
  std::int64_t hi() const { return (std::int64_t{1} << i) * (j + 1); }
  friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
};

/// 2^i (1 + j) < 2^s, i.e. the interval lies inside [0, 2^s).
bool in_dyadic_family(int s, const DyadicInterval& d);

/// All members of the dyadic family for s, ordered by i then j.
std::vector<DyadicInterval> dyadic_family(int s);

/// Disjoint members of the family for s whose union is [0, N), one per set
/// bit of N, largest first. Requires 1 <= N < 2^s and s <= 62.
std::vector<DyadicInterval> dyadic_cover(std::uint64_t N, int s);

struct CoverCheck {
  int s_max = 0;
  std::uint64_t covers_checked = 0;
  std::uint64_t failures = 0;       ///< size > s, member outside the family, or not a partition
  std::optional<std::pair<std::uint64_t, int>> witness;  ///< (N, s) of the first failure
  double max_annulus_ratio = 0.0;   ///< max over s of dyadic_annulus_total(s) / (s 4^s)
};

/// Exhaustive check of dyadic_cover for every 1 <= s <= s_max and 1 <= N < 2^s.
CoverCheck verify_covers(int s_max);

/// Indices (n1, n2) in N0^2 with alpha <= n1 + n2 < beta. Empty when
/// alpha >= beta; throws InvalidArgument for alpha < 0.
std::vector<std::pair<int, int>> annulus(double alpha, double beta);
std::uint64_t annulus_size(double alpha, double beta);

/// Sum over the dyadic family for s of the annulus size of each interval.
std::uint64_t dyadic_annulus_total(int s);

/// Values psi_n(y) for n in the annulus [0, beta_T) and y in a uniform
/// finite space of `points` atoms; layout [index of n][y].
struct SyntheticFamily {
  int beta_T = 0;
  std::size_t points = 0;
  std::vector<double> values;
};

SyntheticFamily zero_family(int beta_T, std::size_t points);
/// Independent fair signs.
SyntheticFamily iid_sign_family(int beta_T, std::size_t points, std::uint64_t seed);
/// psi_n(y) = sign(y) for levels in [level_lo, level_hi), else 0: every sum
/// over that band adds coherently.
SyntheticFamily aligned_family(int beta_T, std::size_t points, int level_lo, int level_hi,
                               std::uint64_t seed);

struct ExceptionalRow {
  int s = 0;
  double measure = 0.0;         ///< fraction of atoms in the exceptional set
  double chebyshev_bound = 0.0; ///< (sum of annulus sizes) / (s^(2+eps) 4^s)
  double explicit_bound = 0.0;  ///< 16 / s^(1+eps)
  std::uint64_t conclusion_violations = 0;
  double max_pointwise_ratio = 0.0;  ///< max |S(0,N)| / theta^-1(D s^(3+eps) 4^s)
};

struct MomentReport {
  double D_T = 0.0;             ///< max over a < b of E theta(|S(a,b)|) / |annulus(a,b)|
  bool hypothesis_ok = true;    ///< false if a declared D_T is too small
  std::optional<std::pair<int, int>> hypothesis_witness;
  int s_T = 0;                  ///< 2^(s_T - 1) <= beta_T < 2^s_T
  std::vector<ExceptionalRow> rows;
  double fitted_exceptional_C = 0.0;  ///< max_s measure * s^(1+eps)
  double fitted_final_C = 0.0;        ///< max over good atoms of the final bound ratio
  std::uint64_t violations = 0;       ///< all exact inequality failures
};

/// Runs the chain: moment hypothesis with measured (or declared) D_T,
/// exceptional sets for each s in [2, s_T] with their measure bounds, and the
/// pointwise bound off the exceptional set for every N < 2^s.
MomentReport moment_pipeline(const SyntheticFamily& family, double kappa, double eps,
                             std::optional<double> declared_D = std::nullopt);

}  // namespace mdalab::schmidt
