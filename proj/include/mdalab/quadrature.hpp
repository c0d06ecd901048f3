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

/// @file quadrature.hpp
/// @brief Adaptive Simpson integration with an absolute tolerance per panel.

#include <cmath>
#include <cstddef>

#include "mdalab/errors.hpp"

namespace mdalab {

namespace detail {

template <class F>
double simpson_step(F& f, double a, double fa, double m, double fm, double b, double fb,
                    double whole, double tol, int depth, std::size_t& evals) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  evals += 2;
  if (!std::isfinite(flm) || !std::isfinite(frm)) {
    throw InvalidArgument("integrand is not finite");
  }
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1, evals) +
         simpson_step(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1, evals);
}

}  // namespace detail

/// Integrates f over [a, b] split into `panels` equal panels, each refined
/// adaptively to absolute tolerance `tol`. Throws InvalidArgument if f
/// returns a non-finite value.
template <class F>
double adaptive_simpson(F&& f, double a, double b, std::size_t panels = 64,
                        double tol = 1e-9, int max_depth = 40,
                        std::size_t* evaluations = nullptr) {
  if (panels == 0) panels = 1;
  std::size_t evals = 0;
  double total = 0.0;
  const double h = (b - a) / static_cast<double>(panels);
  double x0 = a;
  double f0 = f(x0);
  ++evals;
  if (!std::isfinite(f0)) throw InvalidArgument("integrand is not finite");
  for (std::size_t i = 0; i < panels; ++i) {
    const double x1 = (i + 1 == panels) ? b : a + h * static_cast<double>(i + 1);
    const double xm = 0.5 * (x0 + x1);
    const double fm = f(xm);
    const double f1 = f(x1);
    evals += 2;
    if (!std::isfinite(fm) || !std::isfinite(f1)) {
      throw InvalidArgument("integrand is not finite");
    }
    const double whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
    total += detail::simpson_step(f, x0, f0, xm, fm, x1, f1, whole, tol, max_depth, evals);
    x0 = x1;
    f0 = f1;
  }
  if (evaluations) *evaluations = evals;
  return total;
}

}  // namespace mdalab
