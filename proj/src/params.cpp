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

#include "mdalab/params.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <type_traits>

#include "mdalab/errors.hpp"

namespace mdalab {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<Violation> validate_schedule(const ParamSchedule& s, Regime regime) {
  std::vector<Violation> out;
  auto fail = [&out](std::string ineq, std::string detail) {
    out.push_back({std::move(ineq), std::move(detail)});
  };
  for (double v : {s.a, s.b, s.c, s.zeta, s.theta1, s.theta2, s.T}) {
    if (!std::isfinite(v)) {
      fail("finite parameters", "non-finite value " + fmt(v));
      return out;
    }
  }
  if (!(s.a >= 0.0)) fail("0 <= a", "a=" + fmt(s.a));
  if (!(s.a < s.b)) fail("a < b", "a=" + fmt(s.a) + " b=" + fmt(s.b));
  if (!(s.c > 0.0 && s.c < 0.5)) fail("0 < c < 1/2", "c=" + fmt(s.c));
  if (!(s.T >= 1.0)) fail("T >= 1", "T=" + fmt(s.T));
  if (regime == Regime::kBasic) return out;

  if (!(s.a > 0.0)) fail("0 < a", "a=" + fmt(s.a));
  if (!(s.T > 1.0)) fail("T > 1", "T=" + fmt(s.T));
  if (!(s.zeta > 0.0)) fail("zeta > 0", "zeta=" + fmt(s.zeta));
  const double c2 = s.c * s.c;
  if (!(s.zeta * s.b <= c2)) {
    fail("zeta*b <= c^2", "zeta*b=" + fmt(s.zeta * s.b) + " c^2=" + fmt(c2));
  }
  if (s.T > 1.0) {
    const double lt = std::log(s.T);
    const double upper = std::pow(lt, s.theta2) * s.b;
    if (!(c2 <= upper)) {
      fail("c^2 <= (ln T)^theta2 * b", "c^2=" + fmt(c2) + " bound=" + fmt(upper));
    }
    const double lower = std::pow(lt, -s.theta1);
    if (!(s.a >= lower)) {
      fail("a >= (ln T)^-theta1", "a=" + fmt(s.a) + " bound=" + fmt(lower));
    }
  }
  return out;
}

void require_schedule(const ParamSchedule& s, Regime regime) {
  const auto v = validate_schedule(s, regime);
  if (!v.empty()) {
    throw InvalidArgument("schedule violates " + v.front().inequality + " (" +
                          v.front().detail + ")");
  }
}

std::string describe(const ParamSchedule& s) {
  return "a=" + fmt(s.a) + " b=" + fmt(s.b) + " c=" + fmt(s.c) + " T=" + fmt(s.T);
}

Point3 apply_flow(const FlowTime& t, const Point3& p, double cap) {
  const double e3 = -(t.t1 + t.t2);
  if (!(std::abs(t.t1) <= cap && std::abs(t.t2) <= cap && std::abs(e3) <= cap)) {
    throw CapExceeded("flow exponent exceeds " + fmt(cap));
  }
  return {std::exp(t.t1) * p.x1, std::exp(t.t2) * p.x2, std::exp(e3) * p.y};
}

TargetPoint TargetPoint::reduced(double x1, double x2) {
  auto red = [](double v) {
    if (!std::isfinite(v)) throw InvalidArgument("target coordinate is not finite");
    double f = v - std::floor(v);
    return f >= 1.0 ? 0.0 : f;
  };
  return {red(x1), red(x2)};
}

namespace {

double product(const Point3& p) { return std::abs(p.x1) * std::abs(p.x2) * p.y; }

struct ContainsVisitor {
  const Point3& p;

  bool operator()(const OmegaSet& o) const {
    const auto& s = o.s;
    const double pr = product(p);
    return s.a < pr && pr <= s.b && std::abs(p.x1) <= s.c && std::abs(p.x2) <= s.c &&
           1.0 <= p.y && p.y <= s.T;
  }
  bool operator()(const DeltaTile& d) const {
    const auto& s = d.s;
    const double pr = product(p);
    const double lo = s.c * std::exp(-1.0);
    const double shrink = std::exp(-static_cast<double>(d.n1 + d.n2));
    const double a1 = std::abs(p.x1);
    const double a2 = std::abs(p.x2);
    return s.a < pr && pr <= s.b && lo < a1 && a1 <= s.c && lo < a2 && a2 <= s.c &&
           shrink <= p.y && p.y <= s.T * shrink;
  }
  bool operator()(const UpsilonSet& u) const {
    return product(p) <= u.s.a && std::abs(p.x1) <= 0.5 && std::abs(p.x2) <= 0.5 &&
           1.0 <= p.y && p.y <= u.s.T;
  }
  bool operator()(const XiSet& x) const {
    return std::abs(p.x1) <= 1.0 && std::abs(p.x2) <= 1.0 &&
           std::abs(p.x1) * std::abs(p.x2) <= x.gamma;
  }
  bool operator()(const Box3& b) const {
    return b.lo.x1 <= p.x1 && p.x1 <= b.hi.x1 && b.lo.x2 <= p.x2 && p.x2 <= b.hi.x2 &&
           b.lo.y <= p.y && p.y <= b.hi.y;
  }
};

}  // namespace

bool contains(const DomainSet& set, const Point3& p) {
  return std::visit(ContainsVisitor{p}, set);
}

std::optional<Box3> bounding_box(const DomainSet& set) {
  return std::visit(
      [](const auto& s) -> std::optional<Box3> {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, OmegaSet>) {
          return Box3{{-s.s.c, -s.s.c, 1.0}, {s.s.c, s.s.c, s.s.T}};
        } else if constexpr (std::is_same_v<S, DeltaTile>) {
          const double shrink = std::exp(-static_cast<double>(s.n1 + s.n2));
          return Box3{{-s.s.c, -s.s.c, shrink}, {s.s.c, s.s.c, s.s.T * shrink}};
        } else if constexpr (std::is_same_v<S, UpsilonSet>) {
          return Box3{{-0.5, -0.5, 1.0}, {0.5, 0.5, s.s.T}};
        } else if constexpr (std::is_same_v<S, XiSet>) {
          return std::nullopt;
        } else {
          return s;
        }
      },
      set);
}

namespace {

// Inclusive range of levels N = n1 + n2 with alpha <= N < beta and N >= 0.
std::pair<std::int64_t, std::int64_t> band_levels(double alpha, double beta) {
  if (std::isnan(alpha) || std::isnan(beta)) throw InvalidArgument("band endpoint is NaN");
  const double lo = std::max(0.0, std::ceil(alpha));
  const double hi = std::ceil(beta) - 1.0;
  if (hi > 3.0e9) throw CapExceeded("band upper endpoint too large");
  return {static_cast<std::int64_t>(lo), static_cast<std::int64_t>(std::max(hi, -1.0))};
}

}  // namespace

std::uint64_t l1_band_size(double alpha, double beta) {
  const auto [lo, hi] = band_levels(alpha, beta);
  if (hi < lo) return 0;
  // Sum of (N + 1) over lo <= N <= hi.
  const auto ulo = static_cast<std::uint64_t>(lo);
  const auto uhi = static_cast<std::uint64_t>(hi);
  return (uhi + 1) * (uhi + 2) / 2 - ulo * (ulo + 1) / 2;
}

std::vector<std::pair<int, int>> l1_band(double alpha, double beta, std::size_t cap) {
  const std::uint64_t n = l1_band_size(alpha, beta);
  if (n > cap) throw CapExceeded("l1 band has " + std::to_string(n) + " elements");
  const auto [lo, hi] = band_levels(alpha, beta);
  std::vector<std::pair<int, int>> out;
  out.reserve(n);
  for (std::int64_t level = lo; level <= hi; ++level) {
    for (std::int64_t n1 = 0; n1 <= level; ++n1) {
      out.emplace_back(static_cast<int>(n1), static_cast<int>(level - n1));
    }
  }
  return out;
}

}  // namespace mdalab
