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

/// @file controlled_sets.hpp
/// @brief Symbolic inequality sets in R^3, the two kinds of controlled sets,
/// and the sandwich of a hyperbolic box between its eps-perturbations.

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mdalab/params.hpp"
#include "mdalab/rng.hpp"

namespace mdalab::controlled {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lo = -kInf;
  double hi = kInf;
  bool lo_strict = false;
  bool hi_strict = false;

  bool contains(double v) const {
    return (lo_strict ? lo < v : lo <= v) && (hi_strict ? v < hi : v <= hi);
  }
};

/// Conjunction of interval constraints on |x1 x2| y, |x_i|, x_i and y.
struct InequalitySet {
  Interval product;
  std::array<Interval, 2> abs_x;
  std::array<Interval, 2> x;
  Interval y;

  bool contains(const Point3& p) const;
  bool contains_section(double x1, double x2, double y) const;
  /// Finite box containing the set; throws InvalidArgument if unbounded.
  Box3 bounding_box() const;
};

enum class Kind { kTypeI, kTypeII };

/// A set claimed to be (eps, gamma, M)-controlled of the given kind.
/// Type I: inside [-M,M]^2 x (gamma, M], every y-section has area at most
/// C max(eps, -(eps/gamma) ln(eps/gamma)). Type II: inside
/// [-M,M]^2 x [alpha, beta] with beta - alpha <= C eps and alpha >= gamma/2.
struct ControlledSpec {
  /// Throws InvalidArgument unless 0 < eps < gamma < M.
  ControlledSpec(double eps, double gamma, double M, Kind kind, InequalitySet set,
                 double C = 64.0, std::string label = {});

  double eps;
  double gamma;
  double M;
  Kind kind;
  InequalitySet set;
  double C;
  std::string label;
};

struct ClassifyReport {
  bool containment_ok = false;
  double fitted_C = 0.0;          ///< smallest constant consistent with the samples
  double max_section_area = 0.0;  ///< Type I only
  double envelope = 0.0;          ///< Type I: max(eps, -(eps/gamma) ln(eps/gamma))
  double y_length = 0.0;          ///< Type II only
  bool passes = false;            ///< containment_ok and fitted_C <= C
  std::string detail;
};

/// Type I section areas are estimated by Monte Carlo on `probes` y-sections
/// spread over the set's y-range, `samples` points each.
ClassifyReport classify(const ControlledSpec& spec, std::size_t probes = 16,
                        std::uint64_t samples = 20000, std::uint64_t seed = 1);

/// a < |x1 x2| y <= b, u_minus[i] < |x_i| <= u_plus[i] <= 1/2,
/// gamma <= y <= delta <= M.
struct DeltaSpec {
  double a = 0.0;
  double b = 0.0;
  std::array<double, 2> u_minus{};
  std::array<double, 2> u_plus{};
  double gamma = 0.0;
  double delta = 0.0;
  double M = 1.0;
};

/// Throws InvalidArgument on an inconsistent DeltaSpec.
void validate(const DeltaSpec& d);
InequalitySet delta_set(const DeltaSpec& d);
/// Every bound relaxed: product by eps M^2, |x_i| and y by eps M.
InequalitySet delta_outer(const DeltaSpec& d, double eps);
/// Every bound tightened by the same amounts.
InequalitySet delta_inner(const DeltaSpec& d, double eps);

struct Sandwich {
  InequalitySet delta;
  InequalitySet outer;
  InequalitySet inner;
  /// 12 shells covering outer \ delta, then 12 covering delta \ inner. Each
  /// side: product lower/upper, |x_i| lower/upper split by the sign of x_i,
  /// y lower/upper. Controlled with parameters (eps, gamma/2, M + 1).
  std::vector<ControlledSpec> shells;
};

/// Requires eps < min(1/(2M), gamma/(2M), a/(M^2+1)); throws RegimeError
/// otherwise.
Sandwich perturbation_sandwich(const DeltaSpec& d, double eps);

/// Largest eps accepted by perturbation_sandwich (exclusive).
double max_sandwich_eps(const DeltaSpec& d);

/// A valid DeltaSpec drawn from the generator: 0 < a < b <= 1/4,
/// 0 <= u_minus < u_plus <= 1/2, 1/2 <= gamma <= delta <= M, M in [1, 2].
DeltaSpec random_delta_spec(const CounterRng& rng, std::uint64_t index);

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 identity3();
double det(const Mat3& g);
Mat3 inverse(const Mat3& g);
/// Operator norm induced by the sup norm: largest absolute row sum.
double op_norm(const Mat3& g);
Point3 apply(const Mat3& g, const Point3& p);

/// ||g - I|| < eps and ||g^-1 - I|| < eps. Throws InvalidArgument unless
/// |det g - 1| <= 1e-9.
bool in_Veps(const Mat3& g, double eps);

/// A random unimodular g in the eps-neighbourhood, keyed by `index`.
Mat3 sample_Veps(double eps, const CounterRng& rng, std::uint64_t index);

struct SandwichCheck {
  std::uint64_t samples = 0;
  std::uint64_t symmetric_difference = 0;  ///< samples in g^-1 Delta xor Delta
  std::uint64_t outer_violations = 0;      ///< in g^-1 Delta, not in outer
  std::uint64_t inner_violations = 0;      ///< in inner, not in g^-1 Delta
  std::uint64_t coverage_violations = 0;   ///< symmetric difference point in no shell
  std::uint64_t shell_escapes = 0;         ///< shell point outside the outer set
  std::optional<Point3> witness;

  std::uint64_t violations() const {
    return outer_violations + inner_violations + coverage_violations + shell_escapes;
  }
};

/// Half of the samples are uniform in a 10% enlargement of the outer box, the
/// rest are placed within 2 eps M^2 (product) or 2 eps M (coordinates) of a
/// randomly chosen boundary of the set.
SandwichCheck verify_sandwich(const DeltaSpec& d, double eps, const Mat3& g,
                              std::uint64_t samples, std::uint64_t seed);

}  // namespace mdalab::controlled
