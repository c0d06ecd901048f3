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

#include "mdalab/volumes.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <vector>

#include "mdalab/errors.hpp"
#include "mdalab/parallel.hpp"
#include "mdalab/quadrature.hpp"
#include "mdalab/rng.hpp"

namespace mdalab::volumes {
namespace {

// The region needs 0 <= a < b, 0 < c <= 1/2 and T >= 1; c = 1/2 is allowed
// here because the volumes do not depend on the nearest-integer bijection.
void require_region(const ParamSchedule& s) {
  if (!(0.0 <= s.a && s.a < s.b)) throw InvalidArgument("region needs 0 <= a < b");
  if (!(s.c > 0.0 && s.c <= 0.5)) throw InvalidArgument("region needs 0 < c <= 1/2");
  if (!(s.T >= 1.0) || !std::isfinite(s.T)) throw InvalidArgument("region needs finite T >= 1");
}

void require_section_regime(const ParamSchedule& s) {
  require_region(s);
  if (s.b > s.c * s.c) {
    throw RegimeError("closed form requires b <= c^2; use the quadrature oracle");
  }
}

double one(double) { return 1.0; }

// a ln a with the continuous extension 0 at a = 0.
double xlogx(double a) { return a > 0.0 ? a * std::log(a) : 0.0; }

}  // namespace

double xi_area(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("xi_area needs gamma > 0");
  if (gamma >= 1.0) return 4.0;
  return 4.0 * gamma * (1.0 - std::log(gamma));
}

double xi_area_difference_bound(double g1, double g2) {
  if (!(g1 > 0.0 && g1 < g2)) throw InvalidArgument("need 0 < gamma1 < gamma2");
  return 4.0 * std::abs(std::log(std::min(1.0, g1))) * (g2 - g1);
}

double omega_section_area(const ParamSchedule& s, double y) {
  require_section_regime(s);
  if (!(y >= 1.0 && y <= s.T)) throw InvalidArgument("section needs 1 <= y <= T");
  const double d = s.b - s.a;
  return 4.0 * std::log(y) / y * d +
         4.0 / y * (d * (1.0 + 2.0 * std::log(s.c)) - xlogx(s.b) + xlogx(s.a));
}

double omega_volume(const ParamSchedule& s) {
  require_section_regime(s);
  const double lt = std::log(s.T);
  const double d = s.b - s.a;
  return 2.0 * lt * lt * d + 4.0 * lt * (d * (1.0 + 2.0 * std::log(s.c)) - xlogx(s.b) + xlogx(s.a));
}

double weighted_mean(const ParamSchedule& s, const Weight& h, std::size_t panels) {
  require_section_regime(s);
  if (panels < 64) panels = 64;
  const Weight& w = h ? h : Weight(one);
  auto integrand = [&](double u) {
    const double y = std::min(std::exp(u), s.T);
    return w(y / s.T) * omega_section_area(s, std::max(1.0, y)) * y;
  };
  return adaptive_simpson(integrand, 0.0, std::log(s.T), panels, 1e-9);
}

double upsilon_section_area(double a, double q) {
  if (!(q >= 1.0)) throw InvalidArgument("upsilon section needs q >= 1");
  if (!(a >= 0.0)) throw InvalidArgument("upsilon section needs a >= 0");
  if (a == 0.0) return 0.0;
  return xi_area(4.0 * a / q) / 4.0;
}

// ---------------------------------------------------------------------------
// Quadrature oracles.

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

// Relative tolerance. Must stay above the ~1e-12 noise of the inner section
// integral seen by the outer volume integral.
inline constexpr double kGkTolerance = 1e-11;

template <class F>
double gk(F f, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  return GK::integrate(f, lo, hi, 15, kGkTolerance);
}

// Integral of f over [lo, hi] split at the given interior breakpoints.
template <class F>
double gk_pieces(F f, double lo, double hi, std::vector<double> cuts) {
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double l = std::clamp(cuts[i], lo, hi);
    const double r = std::clamp(cuts[i + 1], lo, hi);
    total += gk(f, l, r);
  }
  return total;
}

}  // namespace

double xi_area_quadrature(double gamma) {
  if (!(gamma > 0.0)) throw InvalidArgument("xi_area needs gamma > 0");
  // Chord {x2 in [-1,1] : |x1 x2| <= gamma} has length 2 min(1, gamma/|x1|).
  auto chord = [gamma](double x1) { return x1 == 0.0 ? 2.0 : 2.0 * std::min(1.0, gamma / x1); };
  return 2.0 * gk_pieces(chord, 0.0, 1.0, {gamma});
}

double omega_section_quadrature(const ParamSchedule& s, double y) {
  require_region(s);
  if (!(y > 0.0)) throw InvalidArgument("section needs y > 0");
  const double c = s.c;
  // First-quadrant chord {x2 in [0,c] : a < x1 x2 y <= b}.
  auto chord = [&](double x1) {
    if (x1 <= 0.0) return 0.0;
    const double hi = std::min(c, s.b / (y * x1));
    const double lo = std::min(c, s.a / (y * x1));
    return std::max(0.0, hi - lo);
  };
  // The chord is constant below the first breakpoint and a combination of
  // 1/x1 terms above it, which is smooth in ln x1.
  const double first = std::min(c, (s.a > 0.0 ? s.a : s.b) / (y * c));
  auto chord_log = [&](double v) {
    const double x1 = std::exp(v);
    return chord(x1) * x1;
  };
  double total = gk(chord, 0.0, first);
  if (first < c) {
    total += gk_pieces(chord_log, std::log(first), std::log(c), {std::log(s.b / (y * c))});
  }
  return 4.0 * total;
}

double omega_volume_quadrature(const ParamSchedule& s) {
  require_region(s);
  auto f = [&](double u) {
    const double y = std::exp(u);
    return y * omega_section_quadrature(s, y);
  };
  const double lt = std::log(s.T);
  // The section changes shape where b/(c^2 y) or a/(c^2 y) crosses 1.
  std::vector<double> cuts;
  for (double v : {s.a, s.b}) {
    if (v > 0.0) cuts.push_back(std::log(v / (s.c * s.c)));
  }
  return gk_pieces(f, 0.0, lt, cuts);
}

double weighted_mean_quadrature(const ParamSchedule& s, const Weight& h) {
  require_region(s);
  const Weight& w = h ? h : Weight(one);
  auto f = [&](double u) {
    const double y = std::exp(u);
    return w(std::min(1.0, y / s.T)) * y * omega_section_quadrature(s, y);
  };
  std::vector<double> cuts;
  for (double v : {s.a, s.b}) {
    if (v > 0.0) cuts.push_back(std::log(v / (s.c * s.c)));
  }
  return gk_pieces(f, 0.0, std::log(s.T), cuts);
}

// ---------------------------------------------------------------------------
// Monte Carlo oracles.

namespace {

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

// Mean of f(index) over n samples times `scale`, with its standard error.
template <class F>
Estimate mc_mean(std::uint64_t n, unsigned threads, double scale, F&& f) {
  if (n < 2) throw InvalidArgument("Monte Carlo needs at least 2 samples");
  const auto parts = map_blocks<Moments>(n, 1u << 16, threads, [&](std::size_t lo, std::size_t hi) {
    Moments m;
    for (std::size_t i = lo; i < hi; ++i) {
      const double v = f(static_cast<std::uint64_t>(i));
      m.sum += v;
      m.sum_sq += v * v;
    }
    return m;
  });
  Moments total;
  for (const auto& p : parts) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
  }
  const double nn = static_cast<double>(n);
  const double mean = total.sum / nn;
  const double var = std::max(0.0, (total.sum_sq / nn - mean * mean) * nn / (nn - 1.0));
  return {scale * mean, scale * std::sqrt(var / nn), n};
}

}  // namespace

Estimate xi_area_mc(double gamma, std::uint64_t n, std::uint64_t seed, unsigned threads) {
  if (!(gamma > 0.0)) throw InvalidArgument("xi_area needs gamma > 0");
  const CounterRng rng(seed, stream_id("volumes.xi"));
  return mc_mean(n, threads, 4.0, [&](std::uint64_t i) {
    const double x1 = rng.uniform(i, 0, -1.0, 1.0);
    const double x2 = rng.uniform(i, 1, -1.0, 1.0);
    return std::abs(x1 * x2) <= gamma ? 1.0 : 0.0;
  });
}

Estimate omega_section_mc(const ParamSchedule& s, double y, std::uint64_t n, std::uint64_t seed,
                          unsigned threads) {
  require_region(s);
  const CounterRng rng(seed, stream_id("volumes.section"));
  const DomainSet omega = OmegaSet{s};
  return mc_mean(n, threads, 4.0 * s.c * s.c, [&](std::uint64_t i) {
    const Point3 p{rng.uniform(i, 0, -s.c, s.c), rng.uniform(i, 1, -s.c, s.c), y};
    return contains(omega, p) ? 1.0 : 0.0;
  });
}

Estimate weighted_mean_mc(const ParamSchedule& s, const Weight& h, std::uint64_t n,
                          std::uint64_t seed, unsigned threads) {
  require_region(s);
  const Weight& w = h ? h : Weight(one);
  const CounterRng rng(seed, stream_id("volumes.volume"));
  const DomainSet omega = OmegaSet{s};
  const double box = 4.0 * s.c * s.c * (s.T - 1.0);
  return mc_mean(n, threads, box, [&](std::uint64_t i) {
    const Point3 p{rng.uniform(i, 0, -s.c, s.c), rng.uniform(i, 1, -s.c, s.c),
                   rng.uniform(i, 2, 1.0, s.T)};
    return contains(omega, p) ? w(p.y / s.T) : 0.0;
  });
}

Estimate omega_volume_mc(const ParamSchedule& s, std::uint64_t n, std::uint64_t seed,
                         unsigned threads) {
  return weighted_mean_mc(s, Weight(one), n, seed, threads);
}

Estimate upsilon_section_mc(double a, double q, std::uint64_t n, std::uint64_t seed,
                            unsigned threads) {
  if (!(q >= 1.0 && a >= 0.0)) throw InvalidArgument("upsilon section needs q >= 1, a >= 0");
  const CounterRng rng(seed, stream_id("volumes.upsilon"));
  return mc_mean(n, threads, 1.0, [&](std::uint64_t i) {
    const double u1 = rng.uniform(i, 0, -0.5, 0.5);
    const double u2 = rng.uniform(i, 1, -0.5, 0.5);
    return std::abs(u1 * u2) * q <= a ? 1.0 : 0.0;
  });
}

VolumeReport evaluate(const VolumeQuery& qy, OracleKind oracle, std::uint64_t samples,
                      std::uint64_t seed, unsigned threads) {
  VolumeReport r;
  const bool mc = oracle == OracleKind::kMonteCarlo;
  Estimate est;
  switch (qy.quantity) {
    case Quantity::kXi:
      r.quantity = "xi_area";
      r.closed_form = xi_area(qy.gamma);
      est = mc ? xi_area_mc(qy.gamma, samples, seed, threads)
               : Estimate{xi_area_quadrature(qy.gamma), 0.0, 0};
      break;
    case Quantity::kSection:
      r.quantity = "omega_section_area";
      r.closed_form = omega_section_area(qy.s, qy.y);
      est = mc ? omega_section_mc(qy.s, qy.y, samples, seed, threads)
               : Estimate{omega_section_quadrature(qy.s, qy.y), 0.0, 0};
      break;
    case Quantity::kVolume:
      r.quantity = "omega_volume";
      r.closed_form = omega_volume(qy.s);
      est = mc ? omega_volume_mc(qy.s, samples, seed, threads)
               : Estimate{omega_volume_quadrature(qy.s), 0.0, 0};
      break;
    case Quantity::kWeightedMean:
      r.quantity = "weighted_mean";
      r.closed_form = weighted_mean(qy.s, qy.h);
      est = mc ? weighted_mean_mc(qy.s, qy.h, samples, seed, threads)
               : Estimate{weighted_mean_quadrature(qy.s, qy.h), 0.0, 0};
      break;
    case Quantity::kUpsilon:
      r.quantity = "upsilon_section_area";
      r.closed_form = upsilon_section_area(qy.s.a, qy.q);
      est = mc ? upsilon_section_mc(qy.s.a, qy.q, samples, seed, threads)
               : Estimate{qy.s.a == 0.0 ? 0.0 : xi_area_quadrature(4.0 * qy.s.a / qy.q) / 4.0,
                          0.0, 0};
      break;
  }
  r.oracle_value = est.value;
  r.std_error = est.std_error;
  r.abs_error = std::abs(r.closed_form - est.value);
  r.method = mc ? "monte_carlo" : "gauss_kronrod";
  r.samples_or_nodes = mc ? est.samples : 61;
  return r;
}

}  // namespace mdalab::volumes
