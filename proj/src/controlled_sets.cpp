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

#include "mdalab/controlled_sets.hpp"

#include <algorithm>
#include <cmath>

#include "mdalab/errors.hpp"

namespace mdalab::controlled {

bool InequalitySet::contains(const Point3& p) const {
  const double a1 = std::abs(p.x1);
  const double a2 = std::abs(p.x2);
  return y.contains(p.y) && abs_x[0].contains(a1) && abs_x[1].contains(a2) &&
         x[0].contains(p.x1) && x[1].contains(p.x2) && product.contains(a1 * a2 * p.y);
}

bool InequalitySet::contains_section(double x1, double x2, double yv) const {
  return contains({x1, x2, yv});
}

Box3 InequalitySet::bounding_box() const {
  Box3 b;
  double lo[2], hi[2];
  for (int i = 0; i < 2; ++i) {
    const double r = abs_x[i].hi;
    lo[i] = std::max(-r, x[i].lo);
    hi[i] = std::min(r, x[i].hi);
  }
  b.lo = {lo[0], lo[1], y.lo};
  b.hi = {hi[0], hi[1], y.hi};
  for (double v : {b.lo.x1, b.lo.x2, b.lo.y, b.hi.x1, b.hi.x2, b.hi.y}) {
    if (!std::isfinite(v)) throw InvalidArgument("inequality set is unbounded");
  }
  return b;
}

ControlledSpec::ControlledSpec(double eps_, double gamma_, double M_, Kind kind_,
                               InequalitySet set_, double C_, std::string label_)
    : eps(eps_), gamma(gamma_), M(M_), kind(kind_), set(set_), C(C_), label(std::move(label_)) {
  if (!(0.0 < eps && eps < gamma && gamma < M)) {
    throw InvalidArgument("controlled set needs 0 < eps < gamma < M");
  }
}

ClassifyReport classify(const ControlledSpec& spec, std::size_t probes, std::uint64_t samples,
                        std::uint64_t seed) {
  ClassifyReport r;
  const Box3 box = spec.set.bounding_box();
  const bool x_inside = box.lo.x1 >= -spec.M && box.hi.x1 <= spec.M && box.lo.x2 >= -spec.M &&
                        box.hi.x2 <= spec.M;
  if (spec.kind == Kind::kTypeII) {
    r.y_length = box.hi.y - box.lo.y;
    r.containment_ok = x_inside && box.lo.y >= spec.gamma / 2.0 && box.hi.y <= spec.M;
    r.fitted_C = r.y_length / spec.eps;
    r.passes = r.containment_ok && r.fitted_C <= spec.C;
    r.detail = r.containment_ok ? "type II" : "type II containment fails";
    return r;
  }
  const Interval& yi = spec.set.y;
  const bool y_above = yi.lo > spec.gamma || (yi.lo == spec.gamma && yi.lo_strict);
  r.containment_ok = x_inside && y_above && box.hi.y <= spec.M;
  const double ratio = spec.eps / spec.gamma;
  r.envelope = std::max(spec.eps, -ratio * std::log(ratio));
  if (probes == 0) probes = 1;
  const CounterRng rng(seed, stream_id("controlled.classify"));
  const double ylo = std::max(box.lo.y, spec.gamma);
  const double yhi = std::min(box.hi.y, spec.M);
  const double rect = (box.hi.x1 - box.lo.x1) * (box.hi.x2 - box.lo.x2);
  for (std::size_t j = 0; j < probes; ++j) {
    const double yv = ylo + (static_cast<double>(j) + 0.5) / static_cast<double>(probes) * (yhi - ylo);
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
      const std::uint64_t idx = j * samples + i;
      const double x1 = rng.uniform(idx, 0, box.lo.x1, box.hi.x1);
      const double x2 = rng.uniform(idx, 1, box.lo.x2, box.hi.x2);
      if (spec.set.contains_section(x1, x2, yv)) ++hits;
    }
    const double area = rect * static_cast<double>(hits) / static_cast<double>(samples);
    r.max_section_area = std::max(r.max_section_area, area);
  }
  r.fitted_C = r.max_section_area / r.envelope;
  r.passes = r.containment_ok && r.fitted_C <= spec.C;
  r.detail = r.containment_ok ? "type I" : "type I containment fails";
  return r;
}

void validate(const DeltaSpec& d) {
  auto req = [](bool ok, const char* what) {
    if (!ok) throw InvalidArgument(std::string("DeltaSpec needs ") + what);
  };
  req(0.0 < d.a && d.a < d.b, "0 < a < b");
  for (int i = 0; i < 2; ++i) {
    req(d.u_minus[i] < d.u_plus[i] && d.u_plus[i] <= 0.5, "u_minus < u_plus <= 1/2");
  }
  req(0.0 < d.gamma && d.gamma <= d.delta && d.delta <= d.M, "0 < gamma <= delta <= M");
  req(d.M >= 1.0, "M >= 1");
}

namespace {

Interval open_closed(double lo, double hi) { return {lo, hi, true, false}; }
Interval closed(double lo, double hi) { return {lo, hi, false, false}; }

InequalitySet shifted(const DeltaSpec& d, double s) {
  InequalitySet e;
  const double m2 = s * d.M * d.M;
  const double m1 = s * d.M;
  e.product = open_closed(d.a - m2, d.b + m2);
  for (int i = 0; i < 2; ++i) e.abs_x[i] = open_closed(d.u_minus[i] - m1, d.u_plus[i] + m1);
  e.y = closed(d.gamma - m1, d.delta + m1);
  return e;
}

}  // namespace

InequalitySet delta_set(const DeltaSpec& d) {
  validate(d);
  return shifted(d, 0.0);
}

InequalitySet delta_outer(const DeltaSpec& d, double eps) {
  validate(d);
  return shifted(d, eps);
}

InequalitySet delta_inner(const DeltaSpec& d, double eps) {
  validate(d);
  return shifted(d, -eps);
}

double max_sandwich_eps(const DeltaSpec& d) {
  validate(d);
  const double M = d.M;
  return std::min({1.0 / (2.0 * M), d.gamma / (2.0 * M), d.a / (M * M + 1.0)});
}

DeltaSpec random_delta_spec(const CounterRng& rng, std::uint64_t index) {
  const CounterRng r = rng.derive(index);
  DeltaSpec d;
  d.M = r.uniform(0, 0, 1.0, 2.0);
  d.a = r.uniform(0, 1, 0.01, 0.1);
  d.b = std::min(0.25, d.a + r.uniform(0, 2, 0.01, 0.15));
  for (std::uint32_t i = 0; i < 2; ++i) {
    d.u_minus[i] = r.uniform(0, 3 + i, 0.0, 0.2);
    d.u_plus[i] = r.uniform(0, 5 + i, d.u_minus[i] + 0.05, 0.5);
  }
  d.gamma = r.uniform(0, 7, 0.5, d.M);
  d.delta = r.uniform(0, 8, d.gamma, d.M);
  validate(d);
  return d;
}

Sandwich perturbation_sandwich(const DeltaSpec& d, double eps) {
  const double M = d.M;
  const double limit = max_sandwich_eps(d);
  if (!(eps > 0.0 && eps < limit)) {
    throw RegimeError("perturbation needs 0 < eps < min(1/(2M), gamma/(2M), a/(M^2+1))");
  }
  Sandwich sw;
  sw.delta = shifted(d, 0.0);
  sw.outer = shifted(d, eps);
  sw.inner = shifted(d, -eps);
  const double g = d.gamma / 2.0;
  const double MM = M + 1.0;

  // One side of the sandwich: `base` minus the set whose bounds are `in_*`,
  // split into one shell per violated inequality.
  auto side = [&](const InequalitySet& base, const InequalitySet& in, const char* tag) {
    auto add = [&](InequalitySet e, Kind kind, const std::string& what) {
      sw.shells.emplace_back(eps, g, MM, kind, e, 64.0, std::string(tag) + " " + what);
    };
    InequalitySet e = base;
    e.product = {base.product.lo, in.product.lo, true, false};
    add(e, Kind::kTypeI, "product lower");
    e = base;
    e.product = {in.product.hi, base.product.hi, true, false};
    add(e, Kind::kTypeI, "product upper");
    for (int i = 0; i < 2; ++i) {
      for (int sign : {1, -1}) {
        const std::string coord = "|x" + std::to_string(i + 1) + (sign > 0 ? "|+" : "|-");
        const Interval half = sign > 0 ? Interval{0.0, kInf, false, false}
                                       : Interval{-kInf, 0.0, false, true};
        e = base;
        e.abs_x[i] = {base.abs_x[i].lo, in.abs_x[i].lo, true, false};
        e.x[i] = half;
        add(e, Kind::kTypeI, coord + " lower");
        e = base;
        e.abs_x[i] = {in.abs_x[i].hi, base.abs_x[i].hi, true, false};
        e.x[i] = half;
        add(e, Kind::kTypeI, coord + " upper");
      }
    }
    e = base;
    e.y = {base.y.lo, in.y.lo, false, true};
    add(e, Kind::kTypeII, "y lower");
    e = base;
    e.y = {in.y.hi, base.y.hi, true, false};
    add(e, Kind::kTypeII, "y upper");
  };
  side(sw.outer, sw.delta, "outer");
  side(sw.delta, sw.inner, "inner");
  return sw;
}

Mat3 identity3() { return {{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}}; }

double det(const Mat3& g) {
  return g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
         g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
         g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
}

Mat3 inverse(const Mat3& g) {
  const double d = det(g);
  if (d == 0.0) throw InvalidArgument("singular matrix");
  Mat3 inv;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
      const int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      inv[i][j] = (g[r0][c0] * g[r1][c1] - g[r0][c1] * g[r1][c0]) / d;
    }
  }
  return inv;
}

double op_norm(const Mat3& g) {
  double best = 0.0;
  for (const auto& row : g) best = std::max(best, std::abs(row[0]) + std::abs(row[1]) + std::abs(row[2]));
  return best;
}

Point3 apply(const Mat3& g, const Point3& p) {
  return {g[0][0] * p.x1 + g[0][1] * p.x2 + g[0][2] * p.y,
          g[1][0] * p.x1 + g[1][1] * p.x2 + g[1][2] * p.y,
          g[2][0] * p.x1 + g[2][1] * p.x2 + g[2][2] * p.y};
}

namespace {

Mat3 minus_identity(Mat3 g) {
  for (int i = 0; i < 3; ++i) g[i][i] -= 1.0;
  return g;
}

}  // namespace

bool in_Veps(const Mat3& g, double eps) {
  if (!(std::abs(det(g) - 1.0) <= 1e-9)) throw InvalidArgument("g must have determinant 1");
  return op_norm(minus_identity(g)) < eps && op_norm(minus_identity(inverse(g))) < eps;
}

Mat3 sample_Veps(double eps, const CounterRng& rng, std::uint64_t index) {
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  const CounterRng sub = rng.derive(index);
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    Mat3 a;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) a[i][j] = sub.uniform(attempt, static_cast<std::uint32_t>(3 * i + j), -1.0, 1.0);
    }
    const double n = op_norm(a);
    if (n == 0.0) continue;
    const double scale = eps * sub.uniform(attempt, 9, 0.05, 0.95) / n;
    Mat3 g = identity3();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) g[i][j] += scale * a[i][j];
    }
    const double d = det(g);
    if (!(d > 0.0)) continue;
    const double k = 1.0 / std::cbrt(d);
    for (auto& row : g) {
      for (auto& v : row) v *= k;
    }
    if (in_Veps(g, eps)) return g;
  }
  throw CapExceeded("could not sample an element of V_eps");
}

SandwichCheck verify_sandwich(const DeltaSpec& d, double eps, const Mat3& g,
                              std::uint64_t samples, std::uint64_t seed) {
  const Sandwich sw = perturbation_sandwich(d, eps);
  if (!in_Veps(g, eps)) throw InvalidArgument("g is not in V_eps");
  SandwichCheck out;
  const Box3 ob = sw.outer.bounding_box();
  auto widen = [](double lo, double hi) {
    const double m = 0.05 * (hi - lo);
    return std::pair{lo - m, hi + m};
  };
  const auto [x1lo, x1hi] = widen(ob.lo.x1, ob.hi.x1);
  const auto [x2lo, x2hi] = widen(ob.lo.x2, ob.hi.x2);
  const auto [ylo, yhi] = widen(ob.lo.y, ob.hi.y);
  const double m2 = 2.0 * eps * d.M * d.M;
  const double m1 = 2.0 * eps * d.M;
  const CounterRng rng(seed, stream_id("controlled.sandwich"));

  for (std::uint64_t i = 0; i < samples; ++i) {
    Point3 z{rng.uniform(i, 0, x1lo, x1hi), rng.uniform(i, 1, x2lo, x2hi), rng.uniform(i, 2, ylo, yhi)};
    if (i % 2 == 1) {
      const auto family = rng.bits(i, 3) % 8;
      const bool upper = family % 2 == 1;
      switch (family / 2) {
        case 0: {
          const double pr = std::abs(z.x1 * z.x2);
          if (pr > 0.0) z.y = ((upper ? d.b : d.a) + rng.uniform(i, 4, -m2, m2)) / pr;
          break;
        }
        case 1:
          z.x1 = std::copysign((upper ? d.u_plus[0] : d.u_minus[0]) + rng.uniform(i, 4, -m1, m1), z.x1);
          break;
        case 2:
          z.x2 = std::copysign((upper ? d.u_plus[1] : d.u_minus[1]) + rng.uniform(i, 4, -m1, m1), z.x2);
          break;
        default:
          z.y = (upper ? d.delta : d.gamma) + rng.uniform(i, 4, -m1, m1);
          break;
      }
    }
    ++out.samples;
    const bool in_moved = sw.delta.contains(controlled::apply(g, z));  // z in g^-1 Delta
    const bool in_delta = sw.delta.contains(z);
    auto record = [&](std::uint64_t& counter) {
      ++counter;
      if (!out.witness) out.witness = z;
    };
    if (in_moved && !sw.outer.contains(z)) record(out.outer_violations);
    if (sw.inner.contains(z) && !in_moved) record(out.inner_violations);
    bool in_shell = false;
    for (const auto& s : sw.shells) {
      if (s.set.contains(z)) {
        in_shell = true;
        if (!sw.outer.contains(z)) record(out.shell_escapes);
      }
    }
    if (in_moved != in_delta) {
      ++out.symmetric_difference;
      if (!in_shell) record(out.coverage_violations);
    }
  }
  return out;
}

}  // namespace mdalab::controlled
