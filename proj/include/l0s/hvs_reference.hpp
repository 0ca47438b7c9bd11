// Copyright (c) 2026 The l0s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

namespace l0s {

//! Classical hierarchical-volume-sampling inversion, kept as an
//! independent regression oracle for the constant-kernel sampler.
//!
//! This is a direct transcription of the searchsorted procedure: per-bin
//! masses (here the endpoint-average weight times the bin length), a
//! normalized CDF over the bins, then linear interpolation of each level
//! into its bin. It deliberately shares no code with RayPdf sampling.
//!
//! Weights must be strictly positive (the regression feeds post-maxblur
//! weights, which always are).
inline std::vector<double> hvs_reference_positions(std::span<const double> t,
                                                   std::span<const double> w,
                                                   std::span<const double> levels)
{
  if (t.size() != w.size() || t.size() < 2) {
    throw std::invalid_argument("hvs_reference_positions: malformed inputs");
  }
  const std::size_t bins = t.size() - 1;
  std::vector<double> mass(bins);
  double total = 0.0;
  for (std::size_t i = 0; i < bins; ++i) {
    if (!(w[i] > 0.0) || !(w[i + 1] > 0.0)) {
      throw std::invalid_argument("hvs_reference_positions: weights must be positive");
    }
    mass[i] = (t[i + 1] - t[i]) * 0.5 * (w[i] + w[i + 1]);
    total += mass[i];
  }
  std::vector<double> cdf(bins + 1, 0.0);
  for (std::size_t i = 0; i < bins; ++i) {
    cdf[i + 1] = cdf[i] + mass[i] / total;
  }
  cdf[bins] = 1.0;

  std::vector<double> out;
  out.reserve(levels.size());
  for (double u : levels) {
    if (!(u >= 0.0 && u < 1.0)) {
      throw std::domain_error("hvs_reference_positions: levels must lie in [0,1)");
    }
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t i = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
        (it - cdf.begin()) - 1, 0, static_cast<std::ptrdiff_t>(bins) - 1));
    const double width = cdf[i + 1] - cdf[i];
    const double frac = width > 0.0 ? (u - cdf[i]) / width : 0.0;
    out.push_back(t[i] + frac * (t[i + 1] - t[i]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace l0s
