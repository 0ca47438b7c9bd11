// Copyright (c) 2026 The l0s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "l0s/kernels.hpp"
#include "l0s/rng.hpp"

namespace l0s {

//! Surrogate spacing for the final knot when turning densities into
//! weights; large enough that any positive tail density saturates.
inline constexpr double tail_delta = 1e10;

//! Discrete weights along one ray: strictly increasing knot positions t
//! and a non-negative weight per knot.
struct RayWeights
{
  std::vector<double> t;
  std::vector<double> w;

  std::size_t size() const { return t.size(); }

  double weight_sum() const
  {
    double s = 0.0;
    for (double v : w) s += v;
    return s;
  }
};

inline void validate(const RayWeights& rw)
{
  if (rw.t.size() != rw.w.size()) {
    throw std::invalid_argument("RayWeights: t and w must have equal length");
  }
  if (rw.t.size() < 2) {
    throw std::invalid_argument("RayWeights: need at least two knots");
  }
  for (std::size_t i = 0; i < rw.t.size(); ++i) {
    if (!std::isfinite(rw.t[i])) {
      throw std::invalid_argument("RayWeights: non-finite knot position");
    }
    if (i > 0 && !(rw.t[i] > rw.t[i - 1])) {
      throw std::invalid_argument("RayWeights: knots must be strictly increasing");
    }
    if (!std::isfinite(rw.w[i]) || rw.w[i] < 0.0) {
      throw std::invalid_argument("RayWeights: weights must be finite and non-negative");
    }
  }
}

//! Volume-rendering weights from per-knot densities:
//! alpha_i = 1 - exp(-sigma_i delta_i), w_i = alpha_i prod_{j<i}(1 - alpha_j),
//! with delta the forward knot spacing and tail_delta for the last knot.
//! The weights sum to at most one.
inline RayWeights compute_weights(std::span<const double> sigma, std::span<const double> t)
{
  if (sigma.size() != t.size()) {
    throw std::invalid_argument("compute_weights: sigma and t must have equal length");
  }
  const std::size_t n = t.size();
  if (n < 2) {
    throw std::invalid_argument("compute_weights: need at least two knots");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(sigma[i]) || sigma[i] < 0.0) {
      throw std::invalid_argument("compute_weights: densities must be finite and non-negative");
    }
    if (!std::isfinite(t[i]) || (i > 0 && !(t[i] > t[i - 1]))) {
      throw std::invalid_argument("compute_weights: knots must be strictly increasing");
    }
  }
  RayWeights out;
  out.t.assign(t.begin(), t.end());
  out.w.resize(n);
  double transmit = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double delta = (i + 1 < n) ? t[i + 1] - t[i] : tail_delta;
    const double alpha = -std::expm1(-sigma[i] * delta);
    out.w[i] = alpha * transmit;
    transmit *= 1.0 - alpha;
  }
  return out;
}

//! Neighborhood max-average smoothing with a 0.01 floor:
//! w'_i = (max(w_{i-1}, w_i) + max(w_i, w_{i+1})) / 2 + 0.01,
//! out-of-range neighbors treated as zero. Widens peaks before a steep
//! kernel re-sharpens them; every output is at least 0.01.
inline RayWeights maxblur(const RayWeights& in)
{
  validate(in);
  const std::size_t n = in.w.size();
  RayWeights out;
  out.t = in.t;
  out.w.resize(n);
  auto at = [&](std::size_t i, std::ptrdiff_t off) {
    const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + off;
    return (j < 0 || j >= static_cast<std::ptrdiff_t>(n)) ? 0.0 : in.w[static_cast<std::size_t>(j)];
  };
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = std::max(at(i, -1), in.w[i]);
    const double hi = std::max(in.w[i], at(i, +1));
    out.w[i] = 0.5 * (lo + hi) + 0.01;
  }
  return out;
}

//! Piecewise density along a ray, assembled from knot weights and a kernel
//! kind. Interval masses carry the knot-spacing factor, so cum_mass is the
//! unnormalized CDF at the knots. Immutable after construction.
struct RayPdf
{
  KernelKind kind = KernelKind::constant;
  std::vector<double> t;              //!< knots, length N
  std::vector<double> w;              //!< clamped endpoint weights, length N
  std::vector<double> interval_mass;  //!< length N-1
  std::vector<double> cum_mass;       //!< prefix sums, length N, cum_mass[0] = 0
  double total_mass = 0.0;
  bool empty_input = false;  //!< raw weights were all zero (empty ray)

  std::size_t knot_count() const { return t.size(); }

  //! Index of the interval containing position (clamped to valid range).
  std::size_t interval_index(double position) const
  {
    const auto it = std::upper_bound(t.begin(), t.end(), position);
    const std::ptrdiff_t i = (it - t.begin()) - 1;
    return static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(t.size()) - 2));
  }

  //! Normalized CDF value at a position (0 before the first knot, 1 after
  //! the last).
  double cdf(double position) const
  {
    if (position <= t.front()) return 0.0;
    if (position >= t.back()) return 1.0;
    const std::size_t i = interval_index(position);
    const double delta = t[i + 1] - t[i];
    const double x = std::clamp((position - t[i]) / delta, 0.0, 1.0);
    double partial;
    if (kind == KernelKind::argmax_delta) {
      partial = interval_mass[i] * x;
    } else {
      partial = delta * UnitKernelD(kind, w[i], w[i + 1]).cdf(x);
    }
    return std::clamp((cum_mass[i] + partial) / total_mass, 0.0, 1.0);
  }
};

//! Assemble the ray PDF for one kernel kind. Interval masses are the knot
//! spacing times the unit-kernel integral of the clamped endpoint weights.
//! For argmax_delta, unit mass goes to the interval right of the maximal
//! raw weight (left when that weight sits on the last knot; ties to the
//! lowest index) and zero elsewhere.
inline RayPdf build_pdf(const RayWeights& rw, KernelKind kind)
{
  validate(rw);
  const std::size_t n = rw.size();
  RayPdf pdf;
  pdf.kind = kind;
  pdf.t = rw.t;
  pdf.w.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    pdf.w[i] = std::max(rw.w[i], min_endpoint_weight);
  }
  pdf.empty_input = rw.weight_sum() == 0.0;
  pdf.interval_mass.assign(n - 1, 0.0);
  if (kind == KernelKind::argmax_delta) {
    const std::size_t best =
        static_cast<std::size_t>(std::max_element(rw.w.begin(), rw.w.end()) - rw.w.begin());
    pdf.interval_mass[best + 1 < n ? best : n - 2] = 1.0;
  } else {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      pdf.interval_mass[i] =
          (rw.t[i + 1] - rw.t[i]) * UnitKernelD(kind, pdf.w[i], pdf.w[i + 1]).integral();
    }
  }
  pdf.cum_mass.resize(n);
  pdf.cum_mass[0] = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    pdf.cum_mass[i + 1] = pdf.cum_mass[i] + pdf.interval_mass[i];
  }
  pdf.total_mass = pdf.cum_mass[n - 1];
  return pdf;
}

enum class SampleMode
{
  stratified,
  independent,
};

inline std::string_view to_string(SampleMode mode)
{
  return mode == SampleMode::stratified ? "stratified" : "independent";
}

//! Fine samples along a ray. Positions are sorted and lie within the knot
//! extent. uniform_fallback marks batches produced by the degenerate
//! uniform path (empty ray or zero total mass).
struct SampleBatch
{
  std::vector<double> positions;
  SampleMode mode = SampleMode::stratified;
  std::uint64_t seed = 0;
  bool uniform_fallback = false;
};

//! CDF levels u_k in [0,1) for a batch. Stratified mode jitters one draw
//! per equal slice, u_k = (k + xi_k)/count; independent mode draws count
//! i.i.d. uniforms.
inline std::vector<double> uniform_levels(int count, SampleMode mode, std::uint64_t seed)
{
  if (count < 1) {
    throw std::invalid_argument("uniform_levels: count must be positive");
  }
  Rng rng(seed);
  std::vector<double> u(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    if (mode == SampleMode::stratified) {
      u[static_cast<std::size_t>(k)] = (static_cast<double>(k) + rng.uniform01()) / count;
    } else {
      u[static_cast<std::size_t>(k)] = rng.uniform01();
    }
  }
  return u;
}

//! Deterministic core of inverse transform sampling: map CDF levels in
//! [0,1) through the piecewise inverse CDF. Levels scale to residual mass
//! r = u * total_mass; a binary search picks the interval, and the
//! length-normalized residual goes through the unit-kernel icdf.
inline std::vector<double> invert_levels(const RayPdf& pdf, std::span<const double> levels)
{
  const std::size_t n = pdf.knot_count();
  if (n < 2 || pdf.interval_mass.size() + 1 != n || pdf.cum_mass.size() != n) {
    throw std::invalid_argument("invert_levels: malformed RayPdf");
  }
  std::vector<double> out;
  out.reserve(levels.size());
  for (double u : levels) {
    if (!(u >= 0.0 && u < 1.0)) {
      throw std::domain_error("invert_levels: levels must lie in [0,1)");
    }
    const double r = u * pdf.total_mass;
    const auto it = std::upper_bound(pdf.cum_mass.begin(), pdf.cum_mass.end(), r);
    const std::size_t i = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
        (it - pdf.cum_mass.begin()) - 1, 0, static_cast<std::ptrdiff_t>(n) - 2));
    const double delta = pdf.t[i + 1] - pdf.t[i];
    const double residual = std::max(r - pdf.cum_mass[i], 0.0);
    double x;
    if (pdf.kind == KernelKind::argmax_delta) {
      x = std::clamp(residual / pdf.interval_mass[i], 0.0, 1.0);
    } else {
      const UnitKernelD kernel(pdf.kind, pdf.w[i], pdf.w[i + 1]);
      x = kernel.icdf(std::min(residual / delta, kernel.integral()));
    }
    out.push_back(pdf.t[i] + x * delta);
  }
  return out;
}

//! Draw `count` fine samples from the ray PDF. Identical arguments give a
//! bit-identical batch. Rays with no signal (all raw weights zero, or a
//! hand-built pdf with zero total mass) fall back to uniform sampling over
//! the knot extent and flag the batch.
inline SampleBatch sample(const RayPdf& pdf, int count, SampleMode mode, std::uint64_t seed)
{
  if (count < 1) {
    throw std::invalid_argument("sample: count must be positive");
  }
  SampleBatch batch;
  batch.mode = mode;
  batch.seed = seed;
  const std::vector<double> levels = uniform_levels(count, mode, seed);
  if (pdf.empty_input || !(pdf.total_mass > 0.0)) {
    batch.uniform_fallback = true;
    const double lo = pdf.t.front();
    const double extent = pdf.t.back() - lo;
    batch.positions.reserve(levels.size());
    for (double u : levels) batch.positions.push_back(lo + u * extent);
  } else {
    batch.positions = invert_levels(pdf, levels);
  }
  std::sort(batch.positions.begin(), batch.positions.end());
  return batch;
}

}  // namespace l0s
