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

// Acceptance runner. `mdalab_acceptance [id...]` runs the listed criteria
// (all of them without arguments) and prints one line per criterion:
//
//   criterion <id> <label> PASS|FAIL <detail> (<seconds> s)
//
// A criterion that overruns its time budget fails. The exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mdalab/config.hpp"
#include "mdalab/controlled_sets.hpp"
#include "mdalab/correlations.hpp"
#include "mdalab/counting.hpp"
#include "mdalab/experiments.hpp"
#include "mdalab/lattice_heights.hpp"
#include "mdalab/params.hpp"
#include "mdalab/rng.hpp"
#include "mdalab/schmidt.hpp"
#include "mdalab/table.hpp"
#include "mdalab/tessellation.hpp"
#include "mdalab/volumes.hpp"

using namespace mdalab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

double summary_number(const ExperimentTable& t, const std::string& key) {
  const Cell* c = t.summary_value(key);
  if (c == nullptr) throw std::runtime_error("missing summary key " + key);
  if (const auto* d = std::get_if<double>(c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(c)) return static_cast<double>(*i);
  throw std::runtime_error("summary key " + key + " is not numeric");
}

// ---------------------------------------------------------------------------
// 1. Lattice points of the region correspond one to one with counted q.

Outcome bijection() {
  const std::vector<ParamSchedule> schedules = {
      {0.01, 0.1, 0.45, 1, 1, 1, 1e4},  {0.0, 0.05, 0.3, 1, 1, 1, 1e4},
      {0.02, 0.2, 0.49, 1, 1, 1, 1e4},  {0.001, 0.01, 0.2, 1, 1, 1, 1e4},
      {0.05, 0.12, 0.4, 1, 1, 1, 1e4},
  };
  const CounterRng rng(101, stream_id("acceptance.bijection"));
  std::uint64_t cases = 0;
  std::uint64_t mismatches = 0;
  std::uint64_t total_hits = 0;
  for (const auto& s : schedules) {
    for (std::uint64_t i = 0; i < 100; ++i) {
      const auto x = TargetPoint::reduced(rng.uniform(i, 0), rng.uniform(i, 1));
      const auto report = counting::count_Q(x, s, {.retain_hits = true});
      std::vector<std::uint64_t> lattice_q;
      for (const auto& p : counting::lattice_points_in(OmegaSet{s}, x)) {
        lattice_q.push_back(static_cast<std::uint64_t>(p.q));
      }
      std::sort(lattice_q.begin(), lattice_q.end());
      ++cases;
      total_hits += report.count;
      if (lattice_q.size() != report.count || !report.q_hits || lattice_q != *report.q_hits) {
        ++mismatches;
      }
    }
  }
  return {mismatches == 0, fmt("cases=%llu mismatches=%llu hits=%llu", (unsigned long long)cases,
                               (unsigned long long)mismatches, (unsigned long long)total_hits)};
}

// ---------------------------------------------------------------------------
// 2. Closed-form volumes against quadrature and Monte Carlo.

Outcome volumes_check() {
  const CounterRng rng(202, stream_id("acceptance.volumes"));
  constexpr std::uint64_t kSamples = 10'000'000;
  const volumes::Weight h = [](double u) { return u; };
  double worst_rel = 0.0;
  double worst_sigma = 0.0;
  std::uint64_t rel_fail = 0;
  std::uint64_t mc_fail = 0;
  std::string first_failure;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const double c = rng.uniform(i, 0, 0.2, 0.49);
    const double b = c * c * rng.uniform(i, 1, 0.05, 1.0);
    const double a = b * rng.uniform(i, 2, 0.0, 0.9);
    const double T = std::exp(rng.uniform(i, 3, 1.0, 10.0));
    const ParamSchedule s{a, b, c, 1, 1, 1, T};
    const double y = std::exp(rng.uniform(i, 4, 0.0, std::log(T)));
    const double gamma = rng.uniform(i, 5, 0.01, 1.0);

    struct Row {
      const char* name;
      double closed;
      double quad;
      volumes::Estimate mc;
    };
    const std::uint64_t seed = 1000 + i;
    const Row rows[] = {
        {"xi", volumes::xi_area(gamma), volumes::xi_area_quadrature(gamma),
         volumes::xi_area_mc(gamma, kSamples, seed)},
        {"section", volumes::omega_section_area(s, y), volumes::omega_section_quadrature(s, y),
         volumes::omega_section_mc(s, y, kSamples, seed)},
        {"volume", volumes::omega_volume(s), volumes::omega_volume_quadrature(s),
         volumes::omega_volume_mc(s, kSamples, seed)},
        {"mean", volumes::weighted_mean(s, h), volumes::weighted_mean_quadrature(s, h),
         volumes::weighted_mean_mc(s, h, kSamples, seed)},
    };
    for (const auto& r : rows) {
      const double rel = rel_diff(r.closed, r.quad);
      const double sig = r.mc.std_error > 0.0 ? std::abs(r.mc.value - r.closed) / r.mc.std_error
                                              : (r.mc.value == r.closed ? 0.0 : INFINITY);
      worst_rel = std::max(worst_rel, rel);
      worst_sigma = std::max(worst_sigma, sig);
      const bool rel_ok = rel <= 1e-6;
      const bool mc_ok = sig <= 3.0;
      rel_fail += !rel_ok;
      mc_fail += !mc_ok;
      if ((!rel_ok || !mc_ok) && first_failure.empty()) {
        first_failure = fmt(" first_failure=%s@%llu(%s)", r.name, (unsigned long long)i,
                            describe(s).c_str());
      }
    }
  }
  return {rel_fail == 0 && mc_fail == 0,
          fmt("schedules=20 max_rel_vs_quadrature=%.3g max_sigma=%.3g quad_failures=%llu "
              "mc_failures=%llu",
              worst_rel, worst_sigma, (unsigned long long)rel_fail, (unsigned long long)mc_fail) +
              first_failure};
}

// ---------------------------------------------------------------------------
// 3. Tiles partition the region.

Outcome tessellation_check() {
  const ParamSchedule s{0.01, 0.1, 0.4, 1, 1, 1, 1e4};
  const auto r = tessellation::verify_partition(s, 100'000, 303);
  return {r.violations == 0 && r.points_checked == 100'000,
          fmt("points=%llu tiles=%llu inclusion_checked=%llu violations=%llu%s%s",
              (unsigned long long)r.points_checked, (unsigned long long)r.tiles,
              (unsigned long long)r.inclusion_checked, (unsigned long long)r.violations,
              r.failed_check.empty() ? "" : " check=", r.failed_check.c_str())};
}

// ---------------------------------------------------------------------------
// 4. Successive minima of the flowed lattice.
//
// The oracle enumerates every lattice vector (or wedge) whose norm can be at
// most a certified upper bound S, in long double, so it returns the true
// minimum whenever the minimum is <= S.

using LD = long double;

struct OracleMin {
  LD value = 0;
  heights::LatticeVector v;
  heights::Wedge w;
  std::uint64_t candidates = 0;
};

OracleMin oracle_s1(const heights::LatticeSpec& spec, const FlowTime& t, LD S) {
  const LD e1 = std::exp(LD(t.t1));
  const LD e2 = std::exp(LD(t.t2));
  const LD emT = std::exp(-LD(t.t1) - LD(t.t2));
  const LD x1 = spec.x.x1;
  const LD x2 = spec.x.x2;
  const LD r = spec.r;
  OracleMin best;
  best.value = INFINITY;
  const auto qmax = static_cast<std::int64_t>(std::floor(S / (r * emT)));
  for (std::int64_t q = 0; q <= qmax; ++q) {
    const LD qd = q;
    const auto lo1 = static_cast<std::int64_t>(std::floor(-S / e1 - qd * x1));
    const auto hi1 = static_cast<std::int64_t>(std::ceil(S / e1 - qd * x1));
    const auto lo2 = static_cast<std::int64_t>(std::floor(-S / e2 - qd * x2));
    const auto hi2 = static_cast<std::int64_t>(std::ceil(S / e2 - qd * x2));
    for (std::int64_t p1 = lo1; p1 <= hi1; ++p1) {
      for (std::int64_t p2 = lo2; p2 <= hi2; ++p2) {
        if (q == 0 && p1 == 0 && p2 == 0) continue;
        ++best.candidates;
        const LD n = std::max({e1 * std::abs(p1 + qd * x1), e2 * std::abs(p2 + qd * x2), r * qd * emT});
        if (n < best.value) {
          best.value = n;
          best.v = {p1, p2, q};
        }
      }
    }
  }
  return best;
}

OracleMin oracle_s2(const heights::LatticeSpec& spec, const FlowTime& t, LD S) {
  const LD e1 = std::exp(LD(t.t1));
  const LD e2 = std::exp(LD(t.t2));
  const LD eT = e1 * e2;
  const LD x1 = spec.x.x1;
  const LD x2 = spec.x.x2;
  const LD r = spec.r;
  OracleMin best;
  // w = 0 forces m != 0; the smallest is |m| = 1.
  best.value = eT;
  best.w = {1, 0, 0};
  const auto w1max = static_cast<std::int64_t>(std::floor(S * e2 / r));
  const auto w2max = static_cast<std::int64_t>(std::floor(S * e1 / r));
  for (std::int64_t w1 = -w1max; w1 <= w1max; ++w1) {
    for (std::int64_t w2 = -w2max; w2 <= w2max; ++w2) {
      if (w1 == 0 && w2 == 0) continue;
      const LD z = LD(w1) * x2 - LD(w2) * x1;
      const auto mlo = static_cast<std::int64_t>(std::floor(-S / eT - z));
      const auto mhi = static_cast<std::int64_t>(std::ceil(S / eT - z));
      for (std::int64_t m = mlo; m <= mhi; ++m) {
        ++best.candidates;
        const LD n = std::max({eT * std::abs(m + z), r * std::abs(LD(w1)) / e2, r * std::abs(LD(w2)) / e1});
        if (n < best.value) {
          best.value = n;
          best.w = {m, w1, w2};
        }
      }
    }
  }
  return best;
}

// Gauss-reduced basis of the plane spanned by a pair, in the flowed
// Euclidean metric. The box oracle searches exactly the vectors this short.
std::pair<heights::LatticeVector, heights::LatticeVector> reduced_basis(
    const heights::LatticeSpec& spec, const FlowTime& t,
    std::pair<heights::LatticeVector, heights::LatticeVector> b) {
  auto coords = [&](const heights::LatticeVector& v) {
    const LD q = v.q;
    return std::array<LD, 3>{std::exp(LD(t.t1)) * (v.p1 + q * spec.x.x1),
                             std::exp(LD(t.t2)) * (v.p2 + q * spec.x.x2),
                             spec.r * q * std::exp(-LD(t.t1) - LD(t.t2))};
  };
  auto dot = [&](const heights::LatticeVector& a, const heights::LatticeVector& c) {
    const auto x = coords(a);
    const auto y = coords(c);
    return x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
  };
  auto [u, v] = b;
  if (dot(v, v) < dot(u, u)) std::swap(u, v);
  for (int it = 0; it < 1000; ++it) {
    const auto mu = static_cast<std::int64_t>(std::llround(dot(u, v) / dot(u, u)));
    v = {v.p1 - mu * u.p1, v.p2 - mu * u.p2, v.q - mu * u.q};
    if (dot(v, v) >= dot(u, u)) break;
    std::swap(u, v);
  }
  return {u, v};
}

Outcome heights_check() {
  const CounterRng rng(404, stream_id("acceptance.heights"));
  std::uint64_t oracle_mismatch = 0;
  std::uint64_t box_exceeds = 0;
  std::uint64_t box_equal_s1 = 0;
  std::uint64_t box_equal_s2 = 0;
  std::uint64_t box_s1_required = 0;
  std::uint64_t box_s1_mismatch = 0;
  std::uint64_t box_s2_required = 0;
  std::uint64_t box_s2_mismatch = 0;
  double worst = 0.0;
  std::string first;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const heights::LatticeSpec spec{TargetPoint::reduced(rng.uniform(i, 0), rng.uniform(i, 1)),
                                    std::exp(rng.uniform(i, 2, std::log(0.5), std::log(2.0)))};
    const double t1 = rng.uniform(i, 3, 0.0, 6.0);
    const FlowTime t{t1, rng.uniform(i, 4, 0.0, 6.0 - t1)};
    const auto f1 = heights::s1(spec, t);
    const auto f2 = heights::s2(spec, t);
    const auto o1 = oracle_s1(spec, t, LD(f1.value) * (1 + 1e-9L));
    const auto o2 = oracle_s2(spec, t, LD(f2.value) * (1 + 1e-9L));
    const double d1 = rel_diff(f1.value, static_cast<double>(o1.value));
    const double d2 = rel_diff(f2.value, static_cast<double>(o2.value));
    worst = std::max({worst, d1, d2});
    if (d1 > 1e-12 || d2 > 1e-12) {
      ++oracle_mismatch;
      if (first.empty()) first = fmt(" first_mismatch=%llu", (unsigned long long)i);
    }

    const auto box = heights::brute_force_minima(spec, t, 20);
    if (f1.value > box.s1 * (1 + 1e-12) || f2.value > box.s2 * (1 + 1e-12)) ++box_exceeds;
    box_equal_s1 += rel_diff(f1.value, box.s1) <= 1e-12;
    box_equal_s2 += rel_diff(f2.value, box.s2) <= 1e-12;
    auto in_box = [](const heights::LatticeVector& v) {
      return std::max({std::llabs(v.p1), std::llabs(v.p2), std::llabs(v.q)}) <= 20;
    };
    if (in_box(o1.v)) {
      ++box_s1_required;
      box_s1_mismatch += rel_diff(f1.value, box.s1) > 1e-12;
    }
    const auto [u, v] = reduced_basis(spec, t, heights::decompose_wedge(o2.w));
    if (in_box(u) && in_box(v)) {
      ++box_s2_required;
      box_s2_mismatch += rel_diff(f2.value, box.s2) > 1e-12;
    }
  }

  // The s2 bound is checked as stated, with the component minimum of t, and
  // with the component maximum, which is what the w != 0 case supports.
  std::uint64_t bound_violations = 0;
  std::uint64_t s2_stated_violations = 0;
  std::uint64_t s2_max_violations = 0;
  std::string s2_witness;
  for (std::uint64_t i = 0; i < 10'000; ++i) {
    const std::uint64_t k = 1'000'000 + i;
    const double rs[] = {0.5, 1.0, 2.0};
    const heights::LatticeSpec spec{TargetPoint::reduced(rng.uniform(k, 0), rng.uniform(k, 1)),
                                    rs[rng.bits(k, 2) % 3]};
    const double t1 = rng.uniform(k, 3, 0.0, 6.0);
    const FlowTime t{t1, rng.uniform(k, 4, 0.0, 6.0 - t1)};
    const auto h = heights::height(spec, t);
    const double lo = std::min(t.t1, t.t2);
    const double T = t.t1 + t.t2;
    const double s1_low = std::min(std::exp(lo), spec.r * std::exp(-T));
    const double s2_low = std::min(spec.r * std::exp(-lo), std::exp(T));
    const double s2_low_max = std::min(spec.r * std::exp(-std::max(t.t1, t.t2)), std::exp(T));
    const double ht_up = std::max(std::exp(T) / spec.r, std::exp(-lo));
    const double slack = 1 + 1e-12;
    if (h.s1 * slack < s1_low || h.ht > ht_up * slack) ++bound_violations;
    if (h.s2 * slack < s2_low) {
      ++s2_stated_violations;
      if (s2_witness.empty()) {
        s2_witness = fmt(" s2_counterexample=x(%.6f,%.6f),t(%.4f,%.4f),r=%.4f:s2=%.6g<%.6g",
                         spec.x.x1, spec.x.x2, t.t1, t.t2, spec.r, h.s2, s2_low);
      }
    }
    s2_max_violations += h.s2 * slack < s2_low_max;
  }
  const bool pass = oracle_mismatch == 0 && box_exceeds == 0 && box_s1_mismatch == 0 &&
                    box_s2_mismatch == 0 && bound_violations == 0 && s2_stated_violations == 0;
  return {pass, fmt("samples=200 oracle_mismatches=%llu max_rel=%.3g box20_equal_s1=%llu "
                    "box20_equal_s2=%llu box20_below_fast=%llu box20_s1_required=%llu "
                    "box20_s1_mismatches=%llu box20_s2_required=%llu box20_s2_mismatches=%llu "
                    "bound_samples=10000 s1_and_ht_violations=%llu "
                    "s2_min_t_violations=%llu s2_max_t_violations=%llu",
                    (unsigned long long)oracle_mismatch, worst, (unsigned long long)box_equal_s1,
                    (unsigned long long)box_equal_s2, (unsigned long long)box_exceeds,
                    (unsigned long long)box_s1_required, (unsigned long long)box_s1_mismatch,
                    (unsigned long long)box_s2_required, (unsigned long long)box_s2_mismatch,
                    (unsigned long long)bound_violations, (unsigned long long)s2_stated_violations,
                    (unsigned long long)s2_max_violations) +
                    first + s2_witness};
}

// ---------------------------------------------------------------------------
// 5-7. Default experiments.

ExperimentTable run_default(const std::string& name) {
  return experiments::run_experiment(name, ConfigSection(name, {}), {1, 1});
}

Outcome level_sets() {
  const auto t = run_default("levelset");
  const double slope = summary_number(t, "slope");
  const double C = summary_number(t, "fitted_C");
  const bool passed = summary_number(t, "passed") == 1.0;
  return {passed && slope <= -1.8 && C <= summary_number(t, "C_max"),
          fmt("n=100000 L=4..64 fitted_C=%.4g slope=%.4g", C, slope)};
}

Outcome thin_strips() {
  const auto t = run_default("thinstrip");
  double worst_z = 0.0;
  for (std::size_t k = 0; k < t.rows().size(); ++k) worst_z = std::max(worst_z, std::abs(t.number(k, "z")));
  const bool id = summary_number(t, "identity_ok") == 1.0;
  const bool trend = summary_number(t, "trend_ok") == 1.0;
  return {id && trend && t.rows().size() == 5,
          fmt("n=10000 T=1e3..1e7 max_abs_z=%.3g identity_ok=%d trend_ok=%d", worst_z, id, trend)};
}

Outcome asymptotics() {
  const auto t = run_default("asymptotics");
  const double q = summary_number(t, "fit_quadratic");
  const double plain = summary_number(t, "plain_slope");
  return {q >= 0.08 && q <= 0.12,
          fmt("b=0.05 points=200 fit_quadratic=%.5g plain_slope=%.5g band=[0.08,0.12]", q, plain)};
}

// ---------------------------------------------------------------------------
// 8. Correlations of shifted box counts.

correlations::BoxSet2 random_boxes(const CounterRng& rng, std::uint64_t i, double M) {
  // One or two disjoint rectangles inside [-M, M]^2, split along x.
  const bool two = rng.uniform(i, 0) < 0.5;
  const double xa = rng.uniform(i, 1, -M, M - 0.2 * M);
  const double xb = rng.uniform(i, 2, xa + 0.1 * M, M);
  const double y0 = rng.uniform(i, 3, -M, M - 0.1 * M);
  const double y1 = rng.uniform(i, 4, y0 + 0.05 * M, M);
  if (!two) return correlations::BoxSet2({{xa, xb, y0, y1}});
  const double xm = 0.5 * (xa + xb);
  const double z0 = rng.uniform(i, 5, -M, M - 0.1 * M);
  const double z1 = rng.uniform(i, 6, z0 + 0.05 * M, M);
  return correlations::BoxSet2({{xa, xm, y0, y1}, {xm, xb, z0, z1}});
}

Outcome correlations_check() {
  const CounterRng rng(808, stream_id("acceptance.correlations"));
  double worst = 0.0;
  std::uint64_t pairs = 0;
  for (std::uint64_t i = 0; pairs < 20; ++i) {
    const auto q1 = static_cast<std::int64_t>(1 + rng.bits(i, 10) % 12);
    const auto q2 = static_cast<std::int64_t>(1 + rng.bits(i, 11) % 12);
    if (std::gcd(q1, q2) != 1) continue;
    const auto b1 = random_boxes(rng.derive(1), i, 1.0);
    const auto b2 = random_boxes(rng.derive(2), i, 1.0);
    const double exact = correlations::correlation_exact(b1, b2, q1, q2);
    const double quad = correlations::correlation_quadrature(b1, b2, q1, q2, 2048);
    worst = std::max(worst, std::abs(exact - quad));
    ++pairs;
  }

  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
  double max_ratio = 0.0;
  for (double M : {1.0, 2.0}) {
    for (std::uint64_t d = 0; d < 6; ++d) {
      const auto d1 = random_boxes(rng.derive(10), d + 100 * static_cast<std::uint64_t>(M), M);
      const auto d2 = random_boxes(rng.derive(11), d + 100 * static_cast<std::uint64_t>(M), M);
      for (double t1 : {0.0, 1.0, 2.5}) {
        for (double t2 : {t1, t1 + 1.0, t1 + 3.0}) {
          for (std::int64_t q1 = 1; q1 <= 20; ++q1) {
            for (std::int64_t q2 = 1; q2 <= 20; ++q2) {
              const auto r = correlations::correlation_bound_check(d1, d2, M, {t1, t2}, q1, q2);
              ++checks;
              violations += !r.ok;
              if (r.rhs > 0.0) max_ratio = std::max(max_ratio, r.lhs / r.rhs);
            }
          }
        }
      }
    }
  }
  return {worst <= 1e-4 && violations == 0,
          fmt("pairs=20 max_abs_diff=%.3g bound_checks=%llu violations=%llu max_lhs_over_rhs=%.3g",
              worst, (unsigned long long)checks, (unsigned long long)violations, max_ratio)};
}

// ---------------------------------------------------------------------------
// 9. Double sum over the hypothesis grid.

Outcome double_sum_check() {
  const std::vector<double> grid = {0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 0.9,
                                    0.99, 1.0, 1.25, 1.5, 2.0};
  std::uint64_t cells = 0;
  std::uint64_t direct_checked = 0;
  std::uint64_t direct_mismatch = 0;
  double max_ratio = 0.0;
  std::string where;
  for (double M : {0.5, 1.0, 1.5, 2.0}) {
    for (double t1 = 0.0; t1 <= 5.0; t1 += 0.5) {
      for (double t2 = t1; t1 + t2 <= 10.0 + 1e-12; t2 += 0.5) {
        const FlowTime t{t1, t2};
        const double eT = std::exp(t.sum());
        for (double alpha : grid) {
          if (!(alpha < 1.0) || alpha * eT < 1.0) continue;
          for (double beta : grid) {
            if (!(beta > alpha) || beta > M || beta * eT > 1e5) continue;
            const auto r = correlations::double_sum(t, alpha, beta, M);
            ++cells;
            if (r.ratio > max_ratio) {
              max_ratio = r.ratio;
              where = fmt("M=%g t=(%g,%g) alpha=%g beta=%g", M, t1, t2, alpha, beta);
            }
            if (beta * eT <= 400.0) {
              ++direct_checked;
              const double d = correlations::double_sum_direct(t, alpha, beta, M);
              direct_mismatch += rel_diff(d, r.value) > 1e-10;
            }
          }
        }
      }
    }
  }
  return {max_ratio <= 50.0 && direct_mismatch == 0 && cells > 0,
          fmt("cells=%llu max_ratio=%.4g at %s direct_checked=%llu direct_mismatches=%llu",
              (unsigned long long)cells, max_ratio, where.c_str(),
              (unsigned long long)direct_checked, (unsigned long long)direct_mismatch)};
}

// ---------------------------------------------------------------------------
// 10. Dyadic covers, the sub-quadratic weight and the moment pipeline.

Outcome dyadic_moments() {
  const auto covers = schmidt::verify_covers(12);

  const CounterRng rng(1010, stream_id("acceptance.theta"));
  // Convexity holds only for kappa below about 1.875 (the second derivative
  // turns negative near t = 2.4 above it); the other properties hold on (0, 2].
  constexpr double kConvexKappa = 1.85;
  std::uint64_t theta_fail = 0;
  std::uint64_t nonconvex_above = 0;
  for (std::uint64_t i = 0; i < 10'000; ++i) {
    const double kappa = rng.uniform(i, 0, 0.1, 2.0);
    const double s = std::exp(rng.uniform(i, 1, -5.0, 12.0));
    const double t = std::exp(rng.uniform(i, 2, -5.0, 12.0));
    const double c = std::exp(rng.uniform(i, 3, 0.0, 6.0));
    const double ts = schmidt::theta(kappa, s);
    const double tt = schmidt::theta(kappa, t);
    const double eps = 1e-12;
    const bool convex = schmidt::theta(kappa, 0.5 * (s + t)) <= 0.5 * (ts + tt) * (1 + eps);
    if (kappa > kConvexKappa) nonconvex_above += !convex;
    bool ok = convex || kappa > kConvexKappa;
    ok = ok && (s <= t ? ts <= tt * (1 + eps) : tt <= ts * (1 + eps));
    ok = ok && ts <= s * s * (1 + eps);
    ok = ok && schmidt::theta(kappa, c * t) <= c * c * tt * (1 + eps);
    // Smallest t with theta(t) >= u, by bisection on the monotone weight.
    const double u = std::exp(rng.uniform(i, 4, -10.0, 40.0));
    double lo = 0.0;
    double hi = 1.0;
    while (schmidt::theta(kappa, hi) < u) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (schmidt::theta(kappa, mid) >= u ? hi : lo) = mid;
    }
    ok = ok && hi <= 8.0 * std::sqrt(u) * std::pow(schmidt::log_plus(u), (1.0 + kappa) / 2.0);
    theta_fail += !ok;
  }

  const double eps = 0.5;
  const auto pipe = schmidt::moment_pipeline(schmidt::iid_sign_family(64, 1024, 10), 1.0, eps);
  std::uint64_t row_fail = 0;
  for (const auto& row : pipe.rows) {
    row_fail += !(row.measure <= row.explicit_bound) || row.conclusion_violations != 0;
  }
  const bool pass = covers.failures == 0 && covers.s_max == 12 && theta_fail == 0 &&
                    pipe.hypothesis_ok && pipe.violations == 0 && row_fail == 0 && !pipe.rows.empty();
  return {pass, fmt("covers=%llu cover_failures=%llu annulus_ratio=%.3g theta_cases=10000 "
                    "theta_failures=%llu nonconvex_cases_kappa_above_%.2f=%llu pipeline_rows=%zu "
                    "D_T=%.4g C_exceptional=%.4g pipeline_violations=%llu",
                    (unsigned long long)covers.covers_checked, (unsigned long long)covers.failures,
                    covers.max_annulus_ratio, (unsigned long long)theta_fail, kConvexKappa,
                    (unsigned long long)nonconvex_above, pipe.rows.size(),
                    pipe.D_T, pipe.fitted_exceptional_C, (unsigned long long)(pipe.violations + row_fail))};
}

// ---------------------------------------------------------------------------
// 11. Perturbation sandwich of controlled sets.

Outcome controlled_sets() {
  const CounterRng rng(1111, stream_id("acceptance.controlled"));
  std::uint64_t runs = 0;
  std::uint64_t violations = 0;
  std::uint64_t symdiff = 0;
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto d = controlled::random_delta_spec(rng, i);
    const double eps = 0.5 * controlled::max_sandwich_eps(d);
    std::vector<controlled::Mat3> gs{controlled::identity3()};
    for (std::uint64_t j = 0; j < 10; ++j) gs.push_back(controlled::sample_Veps(eps, rng.derive(i), j));
    for (std::size_t j = 0; j < gs.size(); ++j) {
      const auto r = controlled::verify_sandwich(d, eps, gs[j], 100'000, 7000 + 100 * i + j);
      ++runs;
      violations += r.violations();
      symdiff += r.symmetric_difference;
    }
  }
  return {violations == 0,
          fmt("specs=10 g_per_spec=10+identity runs=%llu samples_per_run=100000 "
              "symmetric_difference_points=%llu violations=%llu",
              (unsigned long long)runs, (unsigned long long)symdiff, (unsigned long long)violations)};
}

// ---------------------------------------------------------------------------
// 12. Experiment output does not depend on the thread count.

Outcome determinism() {
  // Reduced sizes; the blocked reduction is the same at any size.
  const std::map<std::string, std::map<std::string, std::string>> configs = {
      {"levelset", {{"n", "3000"}}},
      {"heightmoment", {{"n", "2000"}}},
      {"l2siegel", {{"n", "2000"}}},
      {"thinstrip", {{"n", "300"}, {"T", "1e3, 1e4, 1e5"}}},
      {"asymptotics", {{"n", "40"}, {"T", "1e2, 1e3, 1e4, 1e5"}}},
      {"equidist", {{"n", "1000"}, {"k_max", "3"}}},
  };
  std::uint64_t compared = 0;
  std::string mismatched;
  for (const auto& name : experiments::experiment_names()) {
    const auto it = configs.find(name);
    const auto params = it == configs.end() ? std::map<std::string, std::string>{} : it->second;
    std::string ref;
    for (unsigned threads : {1u, 4u, 16u}) {
      const auto t = experiments::run_experiment(name, ConfigSection(name, params), {12, threads});
      const std::string fp = t.data_fingerprint();
      if (threads == 1) {
        ref = fp;
      } else {
        ++compared;
        if (fp != ref) mismatched += " " + name + "@" + std::to_string(threads);
      }
    }
  }
  return {mismatched.empty() && compared == 2 * experiments::experiment_names().size(),
          fmt("experiments=%zu threads=1,4,16 comparisons=%llu mismatches=%s",
              experiments::experiment_names().size(), (unsigned long long)compared,
              mismatched.empty() ? "none" : mismatched.c_str())};
}

struct Criterion {
  int id;
  const char* label;
  double budget_seconds;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "bijection", 30, bijection},
      {2, "volumes", 300, volumes_check},
      {3, "tessellation", 60, tessellation_check},
      {4, "heights", 120, heights_check},
      {5, "level_sets", 600, level_sets},
      {6, "thin_strips", 600, thin_strips},
      {7, "asymptotics", 1800, asymptotics},
      {8, "correlations", 300, correlations_check},
      {9, "double_sum", 300, double_sum_check},
      {10, "dyadic_moments", 120, dyadic_moments},
      {11, "controlled_sets", 300, controlled_sets},
      {12, "determinism", 600, determinism},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) {
    char* end = nullptr;
    const long id = std::strtol(argv[i], &end, 10);
    if (end == argv[i] || *end != '\0' || id < 1 || id > static_cast<long>(criteria().size())) {
      std::fprintf(stderr, "usage: %s [criterion id 1-%zu ...]\n", argv[0], criteria().size());
      return 2;
    }
    wanted.insert(static_cast<int>(id));
  }
  int failures = 0;
  for (const auto& c : criteria()) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_seconds) {
      o.pass = false;
      o.detail += fmt(" budget_exceeded=%gs", c.budget_seconds);
    }
    std::printf("criterion %d %s %s %s (%.2f s)\n", c.id, c.label, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures;
}
