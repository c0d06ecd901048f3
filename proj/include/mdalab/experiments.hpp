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

/// @file experiments.hpp
/// @brief Seeded Monte Carlo experiments. Every sample draws from a counter
/// based generator keyed by (seed, experiment, sample index), and partial sums
/// are merged in block order, so tables do not depend on the thread count.

#include <cstdint>
#include <string>
#include <vector>

#include "mdalab/config.hpp"
#include "mdalab/controlled_sets.hpp"
#include "mdalab/expression.hpp"
#include "mdalab/params.hpp"
#include "mdalab/table.hpp"

namespace mdalab::experiments {

struct RunOptions {
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// Samples per parallel block; fixed so the merge order never changes.
inline constexpr std::size_t kBlock = 256;

/// Vol of {x in [0,1)^2 : ht(a(t) Lambda_{x,r}) >= L} against
/// max(1/r, 1/r^2) L^-3 + (1/r) L^-2 e^-min(t).
struct LevelSetParams {
  FlowTime t{3.0, 3.0};
  double r = 1.0;
  std::vector<double> L{4, 8, 16, 32, 64};
  std::uint64_t n = 100'000;
  double C_max = 64.0;
  double slope_max = -1.8;
};
ExperimentTable level_set_measure(const LevelSetParams& p, const RunOptions& run);

enum class MomentWeight { kSquare, kThetaKappa };

/// Integral of weight(ht) over the level set {ht >= eta}, against
/// (max(1/r, 1/r^2)/eta + e^-min(t)/r) * int_{eta/e^2}^{e^(t1+t2+1) max(1, 1/rho)} weight(u)/u^3 du.
struct HeightMomentParams {
  FlowTime t{4.0, 4.0};
  double r = 1.0;
  double rho = 0.1353352832366127;  // e^-2
  std::vector<double> eta{54.598150033144236};  // e^4
  MomentWeight weight = MomentWeight::kSquare;
  double kappa = 1.0;
  std::uint64_t n = 10'000;
  double C_max = 64.0;
};
ExperimentTable height_moment(const HeightMomentParams& p, const RunOptions& run);

enum class ControlledShape { kEmpty, kSliver, kShell };

/// Example sets inside |x_i| <= 1: an empty set, the slab gamma <= y <= gamma + eps
/// (type II), and the hyperbolic shell 1/20 < |x1 x2| y <= 1/20 + eps with
/// gamma < y <= M (type I).
controlled::ControlledSpec example_controlled_set(ControlledShape shape, double eps, double gamma,
                                                  double M);

/// Mean of the squared Siegel transform of the set along a(t) Lambda_x, against
/// e^-(t1+t2) + max(eps, -(eps/gamma) ln(eps/gamma)) max(1, t1+t2)^2.
/// Requires t1 + t2 > max(1, -ln(gamma/2)) and 3 eps < gamma < 1.
ExperimentTable l2_siegel_controlled(const controlled::ControlledSpec& E, const FlowTime& t,
                                     std::uint64_t n, double C_max, const RunOptions& run);

/// Mean number of points of Lambda_x in the thin strip |u1 u2| y <= a_T,
/// |u_i| <= 1/2, 1 <= y <= T, against the exact sum of section areas, and the
/// fraction of x with a nonempty intersection.
struct ThinStripParams {
  Expression a_T = Expression::parse("pow(log(T),-3)");
  std::vector<double> T{1e3, 1e4, 1e5, 1e6, 1e7};
  std::uint64_t n = 10'000;
  double identity_sigma = 3.0;
  double trend_sigma = 2.0;
};
ExperimentTable thin_strip(const ThinStripParams& p, const RunOptions& run);

/// Mean of |L(x; b) cap [1, T]| over random x, fitted as A (ln T)^2 + B ln T + C.
struct AsymptoticsParams {
  double b = 0.05;
  std::vector<double> T{1e2, 3.1622776601683795e2, 1e3, 3.1622776601683795e3, 1e4,
                        3.1622776601683795e4, 1e5, 3.1622776601683795e5, 1e6,
                        3.1622776601683795e6, 1e7};
  std::uint64_t n_points = 200;
  double band_lo = 0.08;
  double band_hi = 0.12;
};
ExperimentTable main_asymptotics(const AsymptoticsParams& p, const RunOptions& run);

/// Mean Siegel transform of a box along t = (k, k) minus the box volume.
struct EquidistParams {
  Box3 box{{-1.0, -1.0, 1.0}, {1.0, 1.0, 2.0}};
  int k_max = 6;
  std::uint64_t n = 4'000;
  double trend_sigma = 2.0;
};
ExperimentTable equidistribution_trend(const EquidistParams& p, const RunOptions& run);

/// Names accepted by run_experiment.
const std::vector<std::string>& experiment_names();

/// Builds parameters from a config section (unknown keys rejected, environment
/// overrides applied) and runs the experiment. Sets all metadata except wall time.
ExperimentTable run_experiment(const std::string& name, ConfigSection section,
                               const RunOptions& run);

/// Exact expected count sum_{q <= T} Vol({|u1 u2| <= a/q, |u_i| <= 1/2}).
double strip_mean_exact(double a, double T);

/// Ordinary least squares of y on the given regressor columns (an intercept
/// column must be supplied explicitly). Throws InvalidArgument when singular.
std::vector<double> least_squares(const std::vector<std::vector<double>>& X,
                                  const std::vector<double>& y);

}  // namespace mdalab::experiments
