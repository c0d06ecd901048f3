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

#include "mdalab/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mdalab/errors.hpp"

namespace mdalab::correlations {

BoxSet2::BoxSet2(std::vector<Rect> rects) : rects_(std::move(rects)) {
  if (rects_.empty()) throw InvalidArgument("BoxSet2 needs at least one rectangle");
  for (const auto& r : rects_) {
    if (!(r.x0 < r.x1 && r.y0 < r.y1) || !std::isfinite(r.area())) {
      throw InvalidArgument("degenerate rectangle");
    }
  }
  for (std::size_t i = 0; i < rects_.size(); ++i) {
    for (std::size_t j = i + 1; j < rects_.size(); ++j) {
      const Rect& a = rects_[i];
      const Rect& b = rects_[j];
      if (std::min(a.x1, b.x1) > std::max(a.x0, b.x0) &&
          std::min(a.y1, b.y1) > std::max(a.y0, b.y0)) {
        throw InvalidArgument("rectangles overlap");
      }
    }
  }
}

BoxSet2 BoxSet2::square(double h) { return BoxSet2({Rect{-h, h, -h, h}}); }

double BoxSet2::area() const {
  double a = 0.0;
  for (const auto& r : rects_) a += r.area();
  return a;
}

bool BoxSet2::contains(double x, double y) const {
  return std::any_of(rects_.begin(), rects_.end(), [&](const Rect& r) {
    return r.x0 <= x && x <= r.x1 && r.y0 <= y && y <= r.y1;
  });
}

BoxSet2 BoxSet2::scaled(double sx, double sy) const {
  if (!(sx > 0.0 && sy > 0.0)) throw InvalidArgument("scale factors must be positive");
  std::vector<Rect> out;
  out.reserve(rects_.size());
  for (const auto& r : rects_) out.push_back({r.x0 * sx, r.x1 * sx, r.y0 * sy, r.y1 * sy});
  return BoxSet2(std::move(out));
}

double BoxSet2::sup_norm() const {
  double m = 0.0;
  for (const auto& r : rects_) {
    m = std::max({m, std::abs(r.x0), std::abs(r.x1), std::abs(r.y0), std::abs(r.y1)});
  }
  return m;
}

namespace {

struct Span {
  std::int64_t lo, hi;
  std::int64_t size() const { return hi >= lo ? hi - lo + 1 : 0; }
};

// Integers k with lo <= k + s <= hi.
Span shifted_span(double lo, double hi, double s) {
  return {static_cast<std::int64_t>(std::ceil(lo - s)), static_cast<std::int64_t>(std::floor(hi - s))};
}

}  // namespace

std::uint64_t count_shifted(const BoxSet2& b, double sx, double sy) {
  sx -= std::floor(sx);
  sy -= std::floor(sy);
  const auto& rs = b.rects();
  if (rs.size() == 1) {
    const Span kx = shifted_span(rs[0].x0, rs[0].x1, sx);
    const Span ky = shifted_span(rs[0].y0, rs[0].y1, sy);
    return static_cast<std::uint64_t>(kx.size() * ky.size());
  }
  // Points on shared edges belong to several rectangles; count each once.
  std::uint64_t total = 0;
  for (std::size_t j = 0; j < rs.size(); ++j) {
    const Span kx = shifted_span(rs[j].x0, rs[j].x1, sx);
    const Span ky = shifted_span(rs[j].y0, rs[j].y1, sy);
    if (kx.size() * ky.size() > 100'000'000) throw CapExceeded("count_shifted enumeration too large");
    for (std::int64_t i1 = kx.lo; i1 <= kx.hi; ++i1) {
      for (std::int64_t i2 = ky.lo; i2 <= ky.hi; ++i2) {
        const double px = static_cast<double>(i1) + sx;
        const double py = static_cast<double>(i2) + sy;
        bool earlier = false;
        for (std::size_t i = 0; i < j && !earlier; ++i) {
          earlier = rs[i].x0 <= px && px <= rs[i].x1 && rs[i].y0 <= py && py <= rs[i].y1;
        }
        if (!earlier) ++total;
      }
    }
  }
  return total;
}

namespace {

// Sum over integers k of |[a0 - k, a1 - k] meet [b0, b1]|.
double overlap_sum(double a0, double a1, double b0, double b1) {
  const auto klo = static_cast<std::int64_t>(std::ceil(a0 - b1));
  const auto khi = static_cast<std::int64_t>(std::floor(a1 - b0));
  double s = 0.0;
  for (std::int64_t k = klo; k <= khi; ++k) {
    const double kd = static_cast<double>(k);
    s += std::max(0.0, std::min(a1 - kd, b1) - std::max(a0 - kd, b0));
  }
  return s;
}

}  // namespace

double correlation_exact(const BoxSet2& b1, const BoxSet2& b2, std::int64_t q1, std::int64_t q2) {
  if (q1 < 1 || q2 < 1) throw InvalidArgument("correlation needs q1, q2 >= 1");
  if (std::gcd(q1, q2) != 1) throw InvalidArgument("correlation_exact needs coprime q1, q2");
  const double d1 = static_cast<double>(q1);
  const double d2 = static_cast<double>(q2);
  double total = 0.0;
  // The k-sum of a product of rectangles factorizes into two 1D sums.
  for (const auto& r : b1.rects()) {
    for (const auto& s : b2.rects()) {
      total += overlap_sum(d2 * r.x0, d2 * r.x1, d1 * s.x0, d1 * s.x1) *
               overlap_sum(d2 * r.y0, d2 * r.y1, d1 * s.y0, d1 * s.y1);
    }
  }
  return total / (d1 * d2 * d1 * d2);
}

double correlation_quadrature(const BoxSet2& b1, const BoxSet2& b2, std::int64_t q1,
                              std::int64_t q2, std::uint64_t nodes_per_dim) {
  if (q1 < 1 || q2 < 1) throw InvalidArgument("correlation needs q1, q2 >= 1");
  if (nodes_per_dim < 2) throw InvalidArgument("need at least 2 nodes per dimension");
  const std::uint64_t n = nodes_per_dim * nodes_per_dim;
  // Korobov generator near n / golden ratio, made coprime to n.
  auto g = static_cast<std::uint64_t>(std::llround(static_cast<double>(n) * 0.6180339887498949));
  while (std::gcd(g, n) != 1) ++g;
  const double inv = 1.0 / static_cast<double>(n);
  const double d1 = static_cast<double>(q1);
  const double d2 = static_cast<double>(q2);
  double sum = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double x = (static_cast<double>(i) + 0.5) * inv;
    const double y = (static_cast<double>((i * g) % n) + 0.5) * inv;
    const auto c1 = count_shifted(b1, d1 * x, d1 * y);
    if (c1 == 0) continue;
    sum += static_cast<double>(c1 * count_shifted(b2, d2 * x, d2 * y));
  }
  return sum * inv;
}

double aux_G(double u1, double u2) {
  const double lo = std::min(u1, u2);
  const double hi = std::max(u1, u2);
  if (hi < 1.0) return 1.0;
  if (lo < 1.0) return hi;
  return u1 * u2;
}

double aux_Ft(const FlowTime& t, double q, double M) {
  if (!(q > 0.0 && M > 0.0)) throw InvalidArgument("F_t needs q > 0 and M > 0");
  const double k = 2.0 * M * q;
  return aux_G(k * std::exp(-t.t1), k * std::exp(-t.t2)) / (q * q) * std::exp(-t.sum());
}

double aux_Ft_explicit(const FlowTime& t, double q, double M) {
  if (!(q > 0.0 && M > 0.0)) throw InvalidArgument("F_t needs q > 0 and M > 0");
  const double lo = t.lower();
  const double hi = t.upper();
  if (q < std::exp(lo) / (2.0 * M)) return std::exp(-t.sum()) / (q * q);
  if (q < std::exp(hi) / (2.0 * M)) return 2.0 * M * std::exp(-(2.0 * lo + hi)) / q;
  return 4.0 * M * M * std::exp(-2.0 * t.sum());
}

BoundCheck correlation_bound_check(const BoxSet2& d1, const BoxSet2& d2, double M,
                                   const FlowTime& t, std::int64_t q1, std::int64_t q2) {
  if (!(t.t1 <= t.t2)) throw InvalidArgument("bound check needs t1 <= t2");
  if (d1.sup_norm() > M || d2.sup_norm() > M) throw InvalidArgument("sets must lie in [-M,M]^2");
  if (q1 < 1 || q2 < 1) throw InvalidArgument("bound check needs q1, q2 >= 1");
  const std::int64_t g = std::gcd(q1, q2);
  BoundCheck r;
  r.q1_reduced = q1 / g;
  r.q2_reduced = q2 / g;
  const double sx = std::exp(-t.t1);
  const double sy = std::exp(-t.t2);
  r.lhs = correlation_exact(d1.scaled(sx, sy), d2.scaled(sx, sy), r.q1_reduced, r.q2_reduced);
  r.rhs = aux_Ft(t, static_cast<double>(std::max(q1, q2) / g), M) * std::max(d1.area(), d2.area());
  r.ok = r.lhs <= r.rhs * (1.0 + 1e-12);
  return r;
}

IntRange summation_range(double gamma, double delta) {
  if (!(gamma <= delta)) throw InvalidArgument("summation range needs gamma <= delta");
  return {static_cast<std::int64_t>(std::ceil(gamma)), static_cast<std::int64_t>(std::floor(delta))};
}

namespace {

void require_double_sum(const FlowTime& t, double alpha, double beta, double M, double cap) {
  if (!(0.0 < alpha && alpha < beta && beta <= M)) {
    throw InvalidArgument("double sum needs 0 < alpha < beta <= M");
  }
  if (!(alpha < 1.0)) throw InvalidArgument("double sum needs alpha < 1");
  if (!(alpha * std::exp(t.sum()) >= 1.0)) throw InvalidArgument("double sum needs alpha e^T >= 1");
  if (beta * std::exp(t.sum()) > cap) throw CapExceeded("beta e^T exceeds the summation cap");
}

}  // namespace

DoubleSumReport double_sum(const FlowTime& t, double alpha, double beta, double M, double cap) {
  require_double_sum(t, alpha, beta, M, cap);
  const double eT = std::exp(t.sum());
  DoubleSumReport r;
  r.range = summation_range(alpha * eT, beta * eT);
  const std::int64_t lo = r.range.lo;
  const std::int64_t hi = r.range.hi;
  if (hi >= lo) {
    std::vector<double> F(static_cast<std::size_t>(hi) + 1, 0.0);
    for (std::int64_t m = 1; m <= hi; ++m) F[m] = aux_Ft(t, static_cast<double>(m), M);
    std::vector<std::int32_t> spf(static_cast<std::size_t>(hi) + 1, 0);
    for (std::int64_t p = 2; p <= hi; ++p) {
      if (spf[p] != 0) continue;
      for (std::int64_t k = p; k <= hi; k += p) {
        if (spf[k] == 0) spf[k] = static_cast<std::int32_t>(p);
      }
    }
    // #{1 <= a <= x : gcd(a, m) = 1} by inclusion-exclusion over primes of m.
    auto coprime_count = [&](std::int64_t m, std::int64_t x) {
      if (x <= 0) return std::int64_t{0};
      std::int64_t primes[16];
      int np = 0;
      for (std::int64_t v = m; v > 1;) {
        const std::int64_t p = spf[v];
        primes[np++] = p;
        while (v % p == 0) v /= p;
      }
      std::int64_t c = 0;
      for (int mask = 0; mask < (1 << np); ++mask) {
        std::int64_t e = 1;
        int bits = 0;
        for (int i = 0; i < np; ++i) {
          if (mask & (1 << i)) {
            e *= primes[i];
            ++bits;
          }
        }
        c += (bits % 2 ? -1 : 1) * (x / e);
      }
      return c;
    };
    // Pairs with gcd d are d (a, b) with coprime a, b in [ceil(lo/d), hi/d];
    // their term depends only on max(a, b).
    double total = 0.0;
    for (std::int64_t d = 1; d <= hi; ++d) {
      const std::int64_t a_lo = (lo + d - 1) / d;
      const std::int64_t a_hi = hi / d;
      if (a_lo > a_hi) continue;
      double part = 0.0;
      if (a_lo == 1) part += F[1];
      for (std::int64_t m = std::max<std::int64_t>(2, a_lo); m <= a_hi; ++m) {
        const std::int64_t c = coprime_count(m, m - 1) - coprime_count(m, a_lo - 1);
        part += 2.0 * static_cast<double>(c) * F[m];
      }
      total += part;
    }
    r.value = total;
  }
  const double T = t.sum();
  r.bound = std::exp(-T) + (beta - alpha) * std::max(1.0, std::log(beta / alpha)) * std::max(1.0, T);
  r.ratio = r.value / r.bound;
  return r;
}

double double_sum_direct(const FlowTime& t, double alpha, double beta, double M, double cap) {
  require_double_sum(t, alpha, beta, M, cap);
  const double eT = std::exp(t.sum());
  const IntRange range = summation_range(alpha * eT, beta * eT);
  // Up to 10^10 terms; the long double accumulator keeps rounding below 1e-12.
  long double total = 0.0L;
  for (std::int64_t q1 = range.lo; q1 <= range.hi; ++q1) {
    for (std::int64_t q2 = range.lo; q2 <= range.hi; ++q2) {
      const std::int64_t g = std::gcd(q1, q2);
      total += aux_Ft(t, static_cast<double>(std::max(q1, q2) / g), M);
    }
  }
  return static_cast<double>(total);
}

double harmonic_sum(double gamma, double delta) {
  if (!(1.0 <= gamma && gamma < delta)) throw InvalidArgument("harmonic sum needs 1 <= gamma < delta");
  const IntRange r = summation_range(gamma, delta);
  double s = 0.0;
  for (std::int64_t q = r.hi; q >= r.lo; --q) s += 1.0 / static_cast<double>(q);
  return s;
}

double divisor_mean(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("divisor_mean needs n >= 1");
  std::uint64_t sigma = 0;
  for (std::uint64_t d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      sigma += d;
      if (d * d != n) sigma += n / d;
    }
  }
  return static_cast<double>(sigma) / static_cast<double>(n);
}

std::uint64_t box_lattice_count(double u1, double u2) {
  if (!(u1 >= 0.0 && u2 >= 0.0)) throw InvalidArgument("box half-sides must be non-negative");
  return static_cast<std::uint64_t>((2.0 * std::floor(u1) + 1.0) * (2.0 * std::floor(u2) + 1.0));
}

}  // namespace mdalab::correlations
