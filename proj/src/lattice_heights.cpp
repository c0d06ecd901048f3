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

#include "mdalab/lattice_heights.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>
#include <vector>

namespace mdalab::heights {
namespace {

struct Scales {
  double et1, et2, eT, emt1, emt2, emT;
};

Scales scales(const LatticeSpec& spec, const FlowTime& t) {
  if (!(spec.r > 0.0) || !std::isfinite(spec.r)) throw InvalidArgument("lattice needs r > 0");
  if (!(std::abs(t.t1) <= kMaxFlowExponent && std::abs(t.t2) <= kMaxFlowExponent &&
        std::abs(t.sum()) <= kMaxFlowExponent)) {
    throw CapExceeded("flow exponent too large");
  }
  return {std::exp(t.t1), std::exp(t.t2),   std::exp(t.sum()),
          std::exp(-t.t1), std::exp(-t.t2), std::exp(-t.sum())};
}

// Sign representative: q > 0, or q == 0 with the first nonzero p_i positive.
LatticeVector normalize(LatticeVector v) {
  const bool flip = v.q < 0 || (v.q == 0 && (v.p1 < 0 || (v.p1 == 0 && v.p2 < 0)));
  if (flip) v = {-v.p1, -v.p2, -v.q};
  return v;
}

bool s1_key_less(const LatticeVector& a, const LatticeVector& b) {
  return std::make_tuple(std::abs(a.q), a.p1, a.p2) < std::make_tuple(std::abs(b.q), b.p1, b.p2);
}

Wedge normalize(Wedge w) {
  const bool flip = w.w1 < 0 || (w.w1 == 0 && (w.w2 < 0 || (w.w2 == 0 && w.m < 0)));
  if (flip) w = {-w.m, -w.w1, -w.w2};
  return w;
}

bool s2_key_less(const Wedge& a, const Wedge& b) {
  return std::make_tuple(a.w1, std::abs(a.w2), a.w2, a.m) <
         std::make_tuple(b.w1, std::abs(b.w2), b.w2, b.m);
}

double vector_norm_scaled(const LatticeSpec& spec, const Scales& k, const LatticeVector& v) {
  const double q = static_cast<double>(v.q);
  return std::max({k.et1 * std::abs(std::fma(q, spec.x.x1, static_cast<double>(v.p1))),
                   k.et2 * std::abs(std::fma(q, spec.x.x2, static_cast<double>(v.p2))),
                   spec.r * std::abs(q) * k.emT});
}

double wedge_norm_scaled(const LatticeSpec& spec, const Scales& k, const Wedge& w) {
  const double w1 = static_cast<double>(w.w1);
  const double w2 = static_cast<double>(w.w2);
  const double z = std::fma(-w2, spec.x.x1, std::fma(w1, spec.x.x2, static_cast<double>(w.m)));
  return std::max({k.eT * std::abs(z), spec.r * k.emt2 * std::abs(w1),
                   spec.r * k.emt1 * std::abs(w2)});
}

}  // namespace

std::array<double, 3> flowed(const LatticeSpec& spec, const FlowTime& t, const LatticeVector& v) {
  const Scales k = scales(spec, t);
  const double q = static_cast<double>(v.q);
  return {k.et1 * std::fma(q, spec.x.x1, static_cast<double>(v.p1)),
          k.et2 * std::fma(q, spec.x.x2, static_cast<double>(v.p2)), spec.r * q * k.emT};
}

double vector_norm(const LatticeSpec& spec, const FlowTime& t, const LatticeVector& v) {
  return vector_norm_scaled(spec, scales(spec, t), v);
}

double wedge_norm(const LatticeSpec& spec, const FlowTime& t, const Wedge& w) {
  return wedge_norm_scaled(spec, scales(spec, t), w);
}

S1Result s1(const LatticeSpec& spec, const FlowTime& t, std::uint64_t cap) {
  const Scales k = scales(spec, t);
  S1Result best;
  // q = 0: the shortest vectors are unit vectors.
  best.value = std::min(k.et1, k.et2);
  best.witness = k.et1 <= k.et2 ? LatticeVector{1, 0, 0} : LatticeVector{0, 1, 0};
  if (k.et1 == k.et2) best.witness = {0, 1, 0};

  // Only q <= L e^(t1+t2) / r can beat L. Search radius starts at the
  // Minkowski bound r^(1/3) and doubles until it covers the best value.
  double radius = std::cbrt(spec.r) * (1.0 + 1e-9);
  std::uint64_t q = 1;
  std::uint64_t work = 0;
  for (;;) {
    auto limit = [&] { return std::min(best.value, radius) * k.eT / spec.r; };
    for (; static_cast<double>(q) <= limit(); ++q) {
      if (++work > cap) throw CapExceeded("s1 search exceeded the iteration cap");
      const double qd = static_cast<double>(q);
      const LatticeVector v{-std::llround(qd * spec.x.x1), -std::llround(qd * spec.x.x2),
                            static_cast<std::int64_t>(q)};
      const double val = vector_norm_scaled(spec, k, v);
      if (val < best.value || (val == best.value && s1_key_less(v, best.witness))) {
        best = {val, v};
      }
    }
    if (best.value <= radius) break;
    radius *= 2.0;
  }
  return best;
}

S2Result s2(const LatticeSpec& spec, const FlowTime& t, std::uint64_t cap) {
  const Scales k = scales(spec, t);
  S2Result best{k.eT, Wedge{1, 0, 0}};  // w = 0 forces |m| >= 1
  double radius = std::cbrt(spec.r * spec.r) * (1.0 + 1e-9);
  std::uint64_t work = 0;
  auto consider = [&](std::int64_t w1, std::int64_t w2) {
    const double z = static_cast<double>(w1) * spec.x.x2 - static_cast<double>(w2) * spec.x.x1;
    const Wedge w{-std::llround(z), w1, w2};
    const double val = wedge_norm_scaled(spec, k, w);
    if (val < best.value || (val == best.value && s2_key_less(w, best.witness))) best = {val, w};
  };
  for (;;) {
    auto bound = [&] { return std::min(best.value, radius) / spec.r; };
    for (std::int64_t w1 = 0; static_cast<double>(w1) * k.emt2 <= bound(); ++w1) {
      for (std::int64_t a = 0; static_cast<double>(a) * k.emt1 <= bound(); ++a) {
        if (++work > cap) throw CapExceeded("s2 search exceeded the iteration cap");
        if (w1 == 0) {
          if (a > 0) consider(0, a);
        } else {
          consider(w1, a);
          if (a > 0) consider(w1, -a);
        }
      }
    }
    if (best.value <= radius) break;
    radius *= 2.0;
  }
  best.witness = normalize(best.witness);
  return best;
}

double s1_lower_bound(const FlowTime& t, double r) {
  return std::min(std::exp(t.lower()), r * std::exp(-t.sum()));
}

double s2_lower_bound(const FlowTime& t, double r) {
  return std::min(r * std::exp(-t.upper()), std::exp(t.sum()));
}

double height_upper_bound(const FlowTime& t, double r) {
  return std::max(std::exp(t.sum()) / r, std::exp(-t.lower()));
}

HeightReport height(const LatticeSpec& spec, const FlowTime& t) {
  const auto a = s1(spec, t);
  const auto b = s2(spec, t);
  HeightReport h;
  h.s1 = a.value;
  h.s2 = b.value;
  h.s3 = spec.r;
  h.s1_witness = a.witness;
  h.s2_witness = b.witness;
  h.ht = 1.0 / std::min({h.s1, h.s2, h.s3});
  h.upper_bound = height_upper_bound(t, spec.r);
  if (h.ht > h.upper_bound * (1.0 + 1e-12)) {
    throw CheckFailure("height exceeds max(e^(t1+t2)/r, e^-min(t))");
  }
  return h;
}

Wedge wedge_of(const LatticeVector& u, const LatticeVector& v) {
  return {u.p1 * v.p2 - u.p2 * v.p1, u.p1 * v.q - u.q * v.p1, u.p2 * v.q - u.q * v.p2};
}

namespace {

// Returns g = gcd(a, b) >= 0 and x, y with a x + b y = g.
std::tuple<std::int64_t, std::int64_t, std::int64_t> ext_gcd(std::int64_t a, std::int64_t b) {
  std::int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    const std::int64_t quo = old_r / r;
    std::tie(old_r, r) = std::make_tuple(r, old_r - quo * r);
    std::tie(old_s, s) = std::make_tuple(s, old_s - quo * s);
    std::tie(old_t, t) = std::make_tuple(t, old_t - quo * t);
  }
  if (old_r < 0) return {-old_r, -old_s, -old_t};
  return {old_r, old_s, old_t};
}

}  // namespace

std::pair<LatticeVector, LatticeVector> decompose_wedge(const Wedge& w) {
  if (w.m == 0 && w.w1 == 0 && w.w2 == 0) throw InvalidArgument("zero wedge");
  // u ^ v in the basis (e1^e2, e1^f, e2^f) corresponds to the cross product
  // u x v = (w2, -w1, m) of coefficient vectors. Build a basis of the integer
  // kernel of the primitive normal, then scale by the content.
  const std::int64_t g = std::gcd(std::gcd(w.m, w.w1), w.w2);
  const std::int64_t A = w.w2 / g;
  const std::int64_t B = -w.w1 / g;
  const std::int64_t C = w.m / g;
  LatticeVector u, v;
  const auto [d, x, y] = ext_gcd(A, B);
  if (d == 0) {
    u = {1, 0, 0};
    v = {0, 1, 0};
  } else {
    u = {B / d, -A / d, 0};
    v = {-C * x, -C * y, d};
  }
  if (wedge_of(u, v) != Wedge{w.m / g, w.w1 / g, w.w2 / g}) std::swap(u, v);
  u = {u.p1 * g, u.p2 * g, u.q * g};
  return {u, v};
}

BruteForceMinima brute_force_minima(const LatticeSpec& spec, const FlowTime& t, int bound,
                                    std::uint64_t pair_cap) {
  if (bound < 1) throw InvalidArgument("coefficient bound must be >= 1");
  const Scales k = scales(spec, t);
  struct Entry {
    LatticeVector v;
    std::array<double, 3> c;
    double euclid;
  };
  std::vector<Entry> all;
  BruteForceMinima out;
  out.s1 = INFINITY;
  double lambda = INFINITY;
  for (std::int64_t q = -bound; q <= bound; ++q) {
    for (std::int64_t p1 = -bound; p1 <= bound; ++p1) {
      for (std::int64_t p2 = -bound; p2 <= bound; ++p2) {
        if (q == 0 && p1 == 0 && p2 == 0) continue;
        const LatticeVector v{p1, p2, q};
        ++out.vectors;
        const double n = vector_norm_scaled(spec, k, v);
        if (n < out.s1 || (n == out.s1 && s1_key_less(normalize(v), out.s1_witness))) {
          out.s1 = n;
          out.s1_witness = normalize(v);
        }
        if (normalize(v) == v) {
          const double qd = static_cast<double>(q);
          const std::array<double, 3> c{
              k.et1 * std::fma(qd, spec.x.x1, static_cast<double>(p1)),
              k.et2 * std::fma(qd, spec.x.x2, static_cast<double>(p2)), spec.r * qd * k.emT};
          const double e = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
          lambda = std::min(lambda, e);
          all.push_back({v, c, e});
        }
      }
    }
  }
  std::sort(all.begin(), all.end(),
            [](const Entry& a, const Entry& b) { return a.euclid < b.euclid; });

  auto cross_norm = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return std::max({std::abs(a[1] * b[2] - a[2] * b[1]), std::abs(a[2] * b[0] - a[0] * b[2]),
                     std::abs(a[0] * b[1] - a[1] * b[0])});
  };
  out.s2 = INFINITY;
  auto scan_pairs = [&](std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        ++out.pairs;
        if (wedge_of(all[i].v, all[j].v) == Wedge{}) continue;
        const double w = cross_norm(all[i].c, all[j].c);
        if (w < out.s2) {
          out.s2 = w;
          out.s2_pair = {all[i].v, all[j].v};
        }
      }
    }
  };
  scan_pairs(std::min<std::size_t>(all.size(), 64));
  const double radius = 2.0 * out.s2 / lambda * (1.0 + 1e-9);
  const auto reach = static_cast<std::size_t>(
      std::upper_bound(all.begin(), all.end(), radius,
                       [](double r, const Entry& e) { return r < e.euclid; }) -
      all.begin());
  if (static_cast<double>(reach) * static_cast<double>(reach) / 2.0 >
      static_cast<double>(pair_cap)) {
    throw CapExceeded("pairwise wedge oracle exceeds the pair cap");
  }
  if (reach > 64) scan_pairs(reach);
  return out;
}

std::uint64_t siegel_indicator(const LatticeSpec& spec, const FlowTime& t, const DomainSet& set) {
  const auto box = bounding_box(set);
  if (!box) throw InvalidArgument("siegel_indicator needs a bounded set");
  scales(spec, t);
  return siegel_count(spec, t, *box, [&](const Point3& p) { return contains(set, p); });
}

namespace {

// #{p in Z : lo <= scale * (p + q x) <= hi}, with candidates re-checked to
// absorb rounding in the division.
std::int64_t axis_count(double lo, double hi, double scale, double qd, double x) {
  const double shift = qd * x;
  auto first = static_cast<std::int64_t>(std::ceil(lo / scale - shift)) - 1;
  auto last = static_cast<std::int64_t>(std::floor(hi / scale - shift)) + 1;
  auto inside = [&](std::int64_t p) {
    const double u = scale * std::fma(qd, x, static_cast<double>(p));
    return lo <= u && u <= hi;
  };
  while (first <= last && !inside(first)) ++first;
  while (last >= first && !inside(last)) --last;
  return last >= first ? last - first + 1 : 0;
}

}  // namespace

std::uint64_t siegel_box_count(const LatticeSpec& spec, const FlowTime& t, const Box3& box,
                               std::uint64_t cap) {
  scales(spec, t);
  const double et1 = std::exp(t.t1);
  const double et2 = std::exp(t.t2);
  const double ry = spec.r * std::exp(-t.sum());
  const double qlo = std::ceil(box.lo.y / ry) - 1.0;
  const double qhi = std::floor(box.hi.y / ry) + 1.0;
  if (qhi - qlo > static_cast<double>(cap)) throw CapExceeded("too many denominators");
  std::uint64_t count = 0;
  for (auto q = static_cast<std::int64_t>(qlo); q <= static_cast<std::int64_t>(qhi); ++q) {
    const double qd = static_cast<double>(q);
    const double y = ry * qd;
    if (y < box.lo.y || y > box.hi.y) continue;
    const std::int64_t n1 = axis_count(box.lo.x1, box.hi.x1, et1, qd, spec.x.x1);
    if (n1 == 0) continue;
    const std::int64_t n2 = axis_count(box.lo.x2, box.hi.x2, et2, qd, spec.x.x2);
    count += static_cast<std::uint64_t>(n1 * n2);
    if (q == 0 && box.lo.x1 <= 0.0 && 0.0 <= box.hi.x1 && box.lo.x2 <= 0.0 && 0.0 <= box.hi.x2) {
      --count;  // the zero vector
    }
  }
  return count;
}

}  // namespace mdalab::heights
