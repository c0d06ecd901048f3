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

#include "mdalab/schmidt.hpp"

#include <algorithm>
#include <cmath>

#include "mdalab/errors.hpp"
#include "mdalab/params.hpp"
#include "mdalab/rng.hpp"

namespace mdalab::schmidt {

double theta(double kappa, double t) {
  return t * t / std::pow(std::log(std::exp(1.0) + std::abs(t)), 1.0 + kappa);
}

double theta_inverse(double kappa, double u) {
  if (!(u >= 0.0) || !std::isfinite(u)) throw InvalidArgument("theta_inverse needs u >= 0");
  if (!(kappa > 0.0 && kappa <= 2.0)) throw InvalidArgument("theta_inverse needs 0 < kappa <= 2");
  if (u == 0.0) return 0.0;
  double hi = 1.0;
  while (theta(kappa, hi) < u) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (theta(kappa, mid) >= u ? hi : lo) = mid;
  }
  return hi;
}

double log_plus(double u) { return std::log(std::max(std::exp(1.0), u)); }

bool in_dyadic_family(int s, const DyadicInterval& d) {
  if (d.i < 0 || d.j < 0 || s < 0 || s > 62 || d.i > 62) return false;
  return d.hi() < (std::int64_t{1} << s);
}

std::vector<DyadicInterval> dyadic_family(int s) {
  if (s < 0 || s > 40) throw InvalidArgument("dyadic family needs 0 <= s <= 40");
  std::vector<DyadicInterval> out;
  for (int i = 0; i < s; ++i) {
    const std::int64_t count = (std::int64_t{1} << (s - i)) - 1;  // j + 1 < 2^(s-i)
    for (std::int64_t j = 0; j < count; ++j) out.push_back({i, j});
  }
  return out;
}

std::vector<DyadicInterval> dyadic_cover(std::uint64_t N, int s) {
  if (s < 1 || s > 62) throw InvalidArgument("dyadic cover needs 1 <= s <= 62");
  if (N < 1 || N >= (std::uint64_t{1} << s)) throw InvalidArgument("dyadic cover needs 1 <= N < 2^s");
  std::vector<DyadicInterval> out;
  std::uint64_t start = 0;
  for (int bit = s - 1; bit >= 0; --bit) {
    if (N & (std::uint64_t{1} << bit)) {
      out.push_back({bit, static_cast<std::int64_t>(start >> bit)});
      start += std::uint64_t{1} << bit;
    }
  }
  return out;
}

CoverCheck verify_covers(int s_max) {
  if (s_max < 1 || s_max > 20) throw InvalidArgument("cover check needs 1 <= s_max <= 20");
  CoverCheck c;
  c.s_max = s_max;
  for (int s = 1; s <= s_max; ++s) {
    for (std::uint64_t N = 1; N < (std::uint64_t{1} << s); ++N) {
      const auto cover = dyadic_cover(N, s);
      bool ok = cover.size() <= static_cast<std::size_t>(s);
      std::int64_t next = 0;
      for (const auto& d : cover) {
        ok = ok && in_dyadic_family(s, d) && d.lo() == next;
        next = d.hi();
      }
      ok = ok && next == static_cast<std::int64_t>(N);
      ++c.covers_checked;
      if (!ok) {
        ++c.failures;
        if (!c.witness) c.witness = std::make_pair(N, s);
      }
    }
    const double ratio = static_cast<double>(dyadic_annulus_total(s)) / (s * std::ldexp(1.0, 2 * s));
    c.max_annulus_ratio = std::max(c.max_annulus_ratio, ratio);
  }
  return c;
}

std::vector<std::pair<int, int>> annulus(double alpha, double beta) {
  if (alpha < 0.0) throw InvalidArgument("annulus needs alpha >= 0");
  if (alpha >= beta) return {};
  return l1_band(alpha, beta);
}

std::uint64_t annulus_size(double alpha, double beta) {
  if (alpha < 0.0) throw InvalidArgument("annulus needs alpha >= 0");
  if (alpha >= beta) return 0;
  return l1_band_size(alpha, beta);
}

std::uint64_t dyadic_annulus_total(int s) {
  std::uint64_t total = 0;
  for (const auto& d : dyadic_family(s)) {
    total += annulus_size(static_cast<double>(d.lo()), static_cast<double>(d.hi()));
  }
  return total;
}

namespace {

std::size_t family_indices(int beta_T) {
  if (beta_T < 1 || beta_T > 4096) throw InvalidArgument("family needs 1 <= beta_T <= 4096");
  return static_cast<std::size_t>(l1_band_size(0.0, beta_T));
}

}  // namespace

SyntheticFamily zero_family(int beta_T, std::size_t points) {
  SyntheticFamily f{beta_T, points, {}};
  f.values.assign(family_indices(beta_T) * points, 0.0);
  return f;
}

SyntheticFamily iid_sign_family(int beta_T, std::size_t points, std::uint64_t seed) {
  SyntheticFamily f = zero_family(beta_T, points);
  const CounterRng rng(seed, stream_id("schmidt.iid"));
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    f.values[k] = (rng.bits(k, 0) & 1) ? 1.0 : -1.0;
  }
  return f;
}

SyntheticFamily aligned_family(int beta_T, std::size_t points, int level_lo, int level_hi,
                               std::uint64_t seed) {
  SyntheticFamily f = zero_family(beta_T, points);
  const CounterRng rng(seed, stream_id("schmidt.aligned"));
  std::size_t idx = 0;
  for (int level = 0; level < beta_T; ++level) {
    for (int n1 = 0; n1 <= level; ++n1, ++idx) {
      if (level < level_lo || level >= level_hi) continue;
      for (std::size_t y = 0; y < points; ++y) {
        f.values[idx * points + y] = (rng.bits(y, 0) & 1) ? 1.0 : -1.0;
      }
    }
  }
  return f;
}

MomentReport moment_pipeline(const SyntheticFamily& family, double kappa, double eps,
                             std::optional<double> declared_D) {
  if (!(kappa > 0.0 && kappa <= 2.0)) throw InvalidArgument("pipeline needs 0 < kappa <= 2");
  if (!(eps > 0.0)) throw InvalidArgument("pipeline needs eps > 0");
  const int B = family.beta_T;
  const std::size_t P = family.points;
  if (P == 0 || family.values.size() != family_indices(B) * P) {
    throw InvalidArgument("family values do not match beta_T and points");
  }
  // prefix[k][y] = sum of psi_n(y) over levels < k.
  std::vector<std::vector<double>> prefix(B + 1, std::vector<double>(P, 0.0));
  std::size_t idx = 0;
  for (int level = 0; level < B; ++level) {
    prefix[level + 1] = prefix[level];
    for (int n1 = 0; n1 <= level; ++n1, ++idx) {
      for (std::size_t y = 0; y < P; ++y) prefix[level + 1][y] += family.values[idx * P + y];
    }
  }
  auto S = [&](std::int64_t a, std::int64_t b, std::size_t y) {
    a = std::min<std::int64_t>(a, B);
    b = std::min<std::int64_t>(b, B);
    return prefix[b][y] - prefix[a][y];
  };

  MomentReport r;
  double measured = 0.0;
  std::pair<int, int> worst{0, 1};
  for (int a = 0; a < B; ++a) {
    for (int b = a + 1; b <= B; ++b) {
      double m = 0.0;
      for (std::size_t y = 0; y < P; ++y) m += theta(kappa, S(a, b, y));
      m /= static_cast<double>(P);
      const double ratio = m / static_cast<double>(annulus_size(a, b));
      if (ratio > measured) {
        measured = ratio;
        worst = {a, b};
      }
    }
  }
  r.D_T = measured;
  if (declared_D) {
    if (measured > *declared_D) {
      r.hypothesis_ok = false;
      r.hypothesis_witness = worst;
      ++r.violations;
    }
    r.D_T = *declared_D;
  }
  const double D = r.D_T;

  r.s_T = 1;
  while ((std::int64_t{1} << r.s_T) <= B) ++r.s_T;
  std::vector<bool> good_final(P, true);
  for (int s = 2; s <= r.s_T; ++s) {
    ExceptionalRow row;
    row.s = s;
    const double four_s = std::ldexp(1.0, 2 * s);
    const double threshold = D * std::pow(s, 2.0 + eps) * four_s;
    const double pointwise_cap = D * std::pow(s, 3.0 + eps) * four_s;
    const double inv_cap = theta_inverse(kappa, pointwise_cap);
    const auto fam = dyadic_family(s);
    row.chebyshev_bound =
        static_cast<double>(dyadic_annulus_total(s)) / (std::pow(s, 2.0 + eps) * four_s);
    row.explicit_bound = 16.0 / std::pow(s, 1.0 + eps);
    std::uint64_t bad = 0;
    for (std::size_t y = 0; y < P; ++y) {
      double sum = 0.0;
      for (const auto& d : fam) sum += theta(kappa, S(d.lo(), d.hi(), y));
      // With D = 0 the threshold is 0; only atoms with a nonzero sum are exceptional.
      const bool exceptional = sum > 0.0 && sum >= threshold;
      if (exceptional) {
        ++bad;
        if (s == r.s_T) good_final[y] = false;
        continue;
      }
      for (std::uint64_t N = 1; N < (std::uint64_t{1} << s); ++N) {
        const double total = S(0, static_cast<std::int64_t>(N), y);
        double cover_sum = 0.0;
        for (const auto& d : dyadic_cover(N, s)) cover_sum += theta(kappa, S(d.lo(), d.hi(), y));
        const double th = theta(kappa, total);
        const bool ok = th <= s * cover_sum * (1.0 + 1e-12) &&
                        (th == 0.0 || th < pointwise_cap) &&
                        std::abs(total) <= inv_cap * (1.0 + 1e-12);
        if (!ok) ++row.conclusion_violations;
        if (inv_cap > 0.0) row.max_pointwise_ratio = std::max(row.max_pointwise_ratio, std::abs(total) / inv_cap);
      }
    }
    row.measure = static_cast<double>(bad) / static_cast<double>(P);
    if (row.measure > row.chebyshev_bound * (1.0 + 1e-12) || row.measure > row.explicit_bound) {
      ++r.violations;
    }
    r.violations += row.conclusion_violations;
    r.fitted_exceptional_C = std::max(r.fitted_exceptional_C, row.measure * std::pow(s, 1.0 + eps));
    r.rows.push_back(row);
  }
  if (D > 0.0 && B >= 3) {
    const double lb = std::log(static_cast<double>(B));
    const double scale = std::sqrt(D) * std::pow(log_plus(D), (1.0 + kappa) / 2.0) *
                         std::pow(lb, 2.0 + (eps + kappa) / 2.0) *
                         std::pow(std::log(lb), (1.0 + kappa) / 2.0) * B;
    for (std::size_t y = 0; y < P; ++y) {
      if (good_final[y]) r.fitted_final_C = std::max(r.fitted_final_C, std::abs(S(0, B, y)) / scale);
    }
  }
  return r;
}

}  // namespace mdalab::schmidt
