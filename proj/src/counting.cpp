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

#include "mdalab/counting.hpp"

#include <chrono>
#include <type_traits>

#include "mdalab/errors.hpp"

namespace mdalab::counting {
namespace {

std::uint64_t horizon(double T, const CountOptions& opt) {
  if (!(T >= 1.0)) throw InvalidArgument("count needs T >= 1");
  if (T > opt.cap) throw CapExceeded("T exceeds the denominator cap");
  return static_cast<std::uint64_t>(std::floor(T));
}

template <class Pred>
CountReport run_count(const TargetPoint& x, double T, const CountOptions& opt,
                      const volumes::Weight* h, Pred pred) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t qmax = horizon(T, opt);
  const bool retain = opt.retain_hits.value_or(T <= 1e6);
  CountReport r;
  r.T = T;
  std::vector<std::uint64_t> hits;
  std::uint64_t count = 0;
  double wsum = 0.0;
  scan_denominators(x, qmax, [&](std::uint64_t q, double d1, double d2) {
    if (pred(q, d1, d2)) {
      ++count;
      if (retain) hits.push_back(q);
      if (h) wsum += (*h)(static_cast<double>(q) / T);
    }
  });
  r.count = count;
  r.weighted_sum = wsum;
  if (retain) r.q_hits = std::move(hits);
  r.elapsed_ns = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start)
          .count());
  return r;
}

}  // namespace

CountReport count_Q(const TargetPoint& x, const ParamSchedule& s, const CountOptions& opt,
                    const volumes::Weight* h) {
  require_schedule(s, Regime::kBasic);
  const double a = s.a;
  const double b = s.b;
  const double c = s.c;
  auto r = run_count(x, s.T, opt, h, [=](std::uint64_t q, double d1, double d2) {
    const double pr = static_cast<double>(q) * d1 * d2;
    return d1 <= c && d2 <= c && a < pr && pr <= b;
  });
  r.s = s;
  return r;
}

CountReport count_L(const TargetPoint& x, double b, double T, const CountOptions& opt) {
  if (!(b >= 0.0)) throw InvalidArgument("count_L needs b >= 0");
  auto r = run_count(x, T, opt, nullptr, [=](std::uint64_t q, double d1, double d2) {
    return static_cast<double>(q) * d1 * d2 <= b;
  });
  r.s.b = b;
  r.s.c = 0.5;
  r.s.T = T;
  return r;
}

CountReport count_N_widmer(const TargetPoint& x, double b, double T, const CountOptions& opt) {
  if (!(b >= 0.0)) throw InvalidArgument("count_N needs b >= 0");
  auto r = run_count(x, T, opt, nullptr,
                     [=](std::uint64_t, double d1, double d2) { return d1 * d2 <= b; });
  r.s.b = b;
  r.s.c = 0.5;
  r.s.T = T;
  return r;
}

double weighted_sum(const TargetPoint& x, const ParamSchedule& s, const volumes::Weight& h) {
  CountOptions opt;
  opt.retain_hits = false;
  return count_Q(x, s, opt, &h).weighted_sum;
}

std::vector<std::uint64_t> count_L_multi(const TargetPoint& x, const std::vector<double>& T,
                                         const std::vector<double>& b) {
  if (T.size() != b.size()) throw InvalidArgument("T and b grids differ in length");
  std::vector<std::uint64_t> counts(T.size(), 0);
  if (T.empty()) return counts;
  std::vector<std::uint64_t> qmax(T.size());
  for (std::size_t j = 0; j < T.size(); ++j) {
    if (j > 0 && T[j] < T[j - 1]) throw InvalidArgument("T grid must be non-decreasing");
    qmax[j] = horizon(T[j], CountOptions{});
  }
  // Largest threshold among horizons that still include q; a cheap filter.
  std::vector<double> suffix_max(T.size());
  double m = -1.0;
  for (std::size_t j = T.size(); j-- > 0;) {
    m = std::max(m, b[j]);
    suffix_max[j] = m;
  }
  std::size_t first = 0;
  scan_denominators(x, qmax.back(), [&](std::uint64_t q, double d1, double d2) {
    while (qmax[first] < q) ++first;
    const double pr = static_cast<double>(q) * d1 * d2;
    if (pr <= suffix_max[first]) {
      for (std::size_t j = first; j < T.size(); ++j) {
        if (pr <= b[j]) ++counts[j];
      }
    }
  });
  return counts;
}

std::vector<LatticePoint> lattice_points_in(const DomainSet& set, const TargetPoint& x) {
  double half_width = 0.0;
  double T = 0.0;
  if (const auto* o = std::get_if<OmegaSet>(&set)) {
    require_schedule(o->s, Regime::kBasic);
    half_width = o->s.c;
    T = o->s.T;
  } else if (const auto* u = std::get_if<UpsilonSet>(&set)) {
    half_width = 0.5;
    T = u->s.T;
  } else {
    throw InvalidArgument("lattice_points_in supports OmegaSet and UpsilonSet");
  }
  const std::uint64_t qmax = horizon(T, CountOptions{});
  std::vector<LatticePoint> out;
  for (std::uint64_t q = 1; q <= qmax; ++q) {
    const double qd = static_cast<double>(q);
    const double qx1 = qd * x.x1;
    const double qx2 = qd * x.x2;
    std::int64_t lo1, hi1, lo2, hi2;
    if (half_width < 0.5) {
      // Only the nearest integer can land within half_width < 1/2.
      lo1 = hi1 = -static_cast<std::int64_t>(std::llround(qx1));
      lo2 = hi2 = -static_cast<std::int64_t>(std::llround(qx2));
    } else {
      lo1 = static_cast<std::int64_t>(std::ceil(-half_width - qx1)) - 1;
      hi1 = static_cast<std::int64_t>(std::floor(half_width - qx1)) + 1;
      lo2 = static_cast<std::int64_t>(std::ceil(-half_width - qx2)) - 1;
      hi2 = static_cast<std::int64_t>(std::floor(half_width - qx2)) + 1;
    }
    for (std::int64_t p1 = lo1; p1 <= hi1; ++p1) {
      for (std::int64_t p2 = lo2; p2 <= hi2; ++p2) {
        const Point3 pt{std::fma(qd, x.x1, static_cast<double>(p1)),
                        std::fma(qd, x.x2, static_cast<double>(p2)), qd};
        if (contains(set, pt)) out.push_back({p1, p2, static_cast<std::int64_t>(q)});
      }
    }
  }
  return out;
}

}  // namespace mdalab::counting
