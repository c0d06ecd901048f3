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

/// @file volumes.hpp
/// @brief Closed-form areas and volumes of the hyperbolic regions, with
/// independent quadrature and Monte Carlo oracles.

#include <cstdint>
#include <functional>
#include <string>

#include "mdalab/params.hpp"

namespace mdalab::volumes {

using Weight = std::function<double(double)>;

/// Area of {max|x_i| <= 1, |x1 x2| <= gamma}: 4 for gamma >= 1, otherwise
/// 4 gamma (1 - ln gamma). Requires gamma > 0.
double xi_area(double gamma);

/// Upper bound 4 |ln min(1, g1)| (g2 - g1) for xi_area(g2) - xi_area(g1).
/// Requires 0 < g1 < g2.
double xi_area_difference_bound(double g1, double g2);

/// Area of the y-section of the counting region. Requires 1 <= y <= T and
/// b <= c^2; throws RegimeError when b > c^2 (use the quadrature oracle).
double omega_section_area(const ParamSchedule& s, double y);

/// Volume of the counting region
///   2 (ln T)^2 (b - a) + 4 ln T ((b - a)(1 + 2 ln c) - b ln b + a ln a).
/// Same regime as omega_section_area.
double omega_volume(const ParamSchedule& s);

/// Integral over y in [1, T] of h(y/T) times the section area, by adaptive
/// Simpson in ln y with at least `panels` panels.
double weighted_mean(const ParamSchedule& s, const Weight& h, std::size_t panels = 64);

/// Area of the q-section of the thin strip, {max|u_i| <= 1/2, |u1 u2| q <= a},
/// equal to xi_area(4a/q)/4. Zero for a = 0. Requires q >= 1.
double upsilon_section_area(double a, double q);

// Oracles. These integrate the defining inequalities directly and share no
// code with the closed forms above.

/// Iterated Gauss-Kronrod integration of the exact chord length.
double xi_area_quadrature(double gamma);
/// Valid for any b (no b <= c^2 restriction).
double omega_section_quadrature(const ParamSchedule& s, double y);
double omega_volume_quadrature(const ParamSchedule& s);
double weighted_mean_quadrature(const ParamSchedule& s, const Weight& h);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

/// Uniform sampling of [-1,1]^2.
Estimate xi_area_mc(double gamma, std::uint64_t n, std::uint64_t seed, unsigned threads = 1);
/// Uniform sampling of [-c,c]^2.
Estimate omega_section_mc(const ParamSchedule& s, double y, std::uint64_t n,
                          std::uint64_t seed, unsigned threads = 1);
/// Uniform sampling of [-c,c]^2 x [1,T].
Estimate omega_volume_mc(const ParamSchedule& s, std::uint64_t n, std::uint64_t seed,
                         unsigned threads = 1);
Estimate weighted_mean_mc(const ParamSchedule& s, const Weight& h, std::uint64_t n,
                          std::uint64_t seed, unsigned threads = 1);
/// Uniform sampling of [-1/2,1/2]^2.
Estimate upsilon_section_mc(double a, double q, std::uint64_t n, std::uint64_t seed,
                            unsigned threads = 1);

enum class Quantity { kXi, kSection, kVolume, kWeightedMean, kUpsilon };
enum class OracleKind { kQuadrature, kMonteCarlo };

struct VolumeQuery {
  Quantity quantity = Quantity::kVolume;
  ParamSchedule s;
  double y = 1.0;      ///< kSection
  double gamma = 0.1;  ///< kXi
  double q = 1.0;      ///< kUpsilon
  Weight h;            ///< kWeightedMean; defaults to 1
};

struct VolumeReport {
  std::string quantity;
  double closed_form = 0.0;
  double oracle_value = 0.0;
  double abs_error = 0.0;
  double std_error = 0.0;  ///< zero for quadrature
  std::string method;
  std::uint64_t samples_or_nodes = 0;
};

VolumeReport evaluate(const VolumeQuery& query, OracleKind oracle, std::uint64_t samples,
                      std::uint64_t seed, unsigned threads = 1);

}  // namespace mdalab::volumes
