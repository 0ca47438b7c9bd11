// Copyright (c) 2026 The l0s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace l0s {

namespace detail {

template <typename F>
double adaptive_simpson_step(const F& f,
                             double lo,
                             double hi,
                             double f_lo,
                             double f_mid,
                             double f_hi,
                             double whole,
                             double tol,
                             int depth)
{
  const double mid = 0.5 * (lo + hi);
  const double lm = 0.5 * (lo + mid);
  const double mh = 0.5 * (mid + hi);
  const double f_lm = f(lm);
  const double f_mh = f(mh);
  const double left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lm + f_mid);
  const double right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_mh + f_hi);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_step(f, lo, mid, f_lo, f_lm, f_mid, left, 0.5 * tol, depth - 1)
       + adaptive_simpson_step(f, mid, hi, f_mid, f_mh, f_hi, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

//! Adaptive Simpson quadrature of f over [lo, hi] to absolute tolerance
//! abs_tol. Suitable for smooth integrands; callers must split at known
//! breakpoints (kinks, spikes) themselves or the initial panel may miss them.
template <typename F>
double integrate_adaptive(const F& f, double lo, double hi, double abs_tol, int max_depth = 55)
{
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("integrate_adaptive: invalid bounds");
  }
  if (lo == hi) return 0.0;
  const double mid = 0.5 * (lo + hi);
  const double f_lo = f(lo);
  const double f_mid = f(mid);
  const double f_hi = f(hi);
  const double whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
  return detail::adaptive_simpson_step(f, lo, hi, f_lo, f_mid, f_hi, whole, abs_tol, max_depth);
}

//! Integrate over [lo, hi] split at interior breakpoints (sorted or not;
//! values outside (lo, hi) are ignored). Tolerance is divided evenly
//! across the resulting segments.
template <typename F>
double integrate_segmented(const F& f,
                           double lo,
                           double hi,
                           std::span<const double> breakpoints,
                           double abs_tol)
{
  std::vector<double> cuts;
  cuts.reserve(breakpoints.size() + 2);
  cuts.push_back(lo);
  for (double b : breakpoints) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  const double seg_tol = abs_tol / static_cast<double>(cuts.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) {
      total += integrate_adaptive(f, cuts[i], cuts[i + 1], seg_tol);
    }
  }
  return total;
}

}  // namespace l0s
