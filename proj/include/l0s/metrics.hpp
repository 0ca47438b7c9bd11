// Copyright (c) 2026 The l0s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "l0s/kernels.hpp"
#include "l0s/ray_pdf.hpp"
#include "l0s/scenes.hpp"

namespace l0s {

//! One diagnostic curve over endpoint weight a (the other endpoint fixed
//! at b = 1): bias or integral per grid point.
struct KernelCurve
{
  KernelKind kind = KernelKind::constant;
  std::vector<double> a_grid;
  std::vector<double> values;
};

//! n log-spaced points in [lo, hi], ascending, endpoints included.
inline std::vector<double> log_grid(double lo, double hi, int n)
{
  if (!(lo > 0.0 && hi > lo) || n < 2) {
    throw std::invalid_argument("log_grid: need 0 < lo < hi and n >= 2");
  }
  std::vector<double> grid(static_cast<std::size_t>(n));
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (int i = 0; i < n; ++i) {
    grid[static_cast<std::size_t>(i)] =
        std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

inline KernelCurve bias_curve(KernelKind kind, std::span<const double> a_grid)
{
  KernelCurve curve;
  curve.kind = kind;
  curve.a_grid.assign(a_grid.begin(), a_grid.end());
  curve.values.reserve(a_grid.size());
  for (double a : a_grid) {
    curve.values.push_back(UnitKernelD(kind, a, 1.0).bias());
  }
  return curve;
}

inline KernelCurve integral_curve(KernelKind kind, std::span<const double> a_grid)
{
  KernelCurve curve;
  curve.kind = kind;
  curve.a_grid.assign(a_grid.begin(), a_grid.end());
  curve.values.reserve(a_grid.size());
  for (double a : a_grid) {
    curve.values.push_back(UnitKernelD(kind, a, 1.0).integral());
  }
  return curve;
}

//! Shared knobs for the coarse->blur->pdf->sample pipeline runs.
//! Per-trial seeds derive from `seed` and the trial index only, never from
//! the kernel kind, so runs over different kernels are paired: they see
//! identical coarse stages and identical CDF levels.
struct PipelineOptions
{
  int n_coarse = 64;
  int n_fine = 128;
  int n_trials = 1000;
  std::uint64_t seed = 1;
  bool use_maxblur = true;
  bool jitter = false;
};

//! How tightly fine samples concentrate around the true surfaces.
struct ConcentrationReport
{
  KernelKind kind = KernelKind::constant;
  int sample_count = 0;                      //!< total fine samples over all trials
  double mean_distance = 0.0;                //!< mean |sample - nearest surface|
  std::vector<double> interval_frequency;    //!< per coarse interval, sums to 1
  std::vector<double> trial_mean_distance;   //!< one entry per trial, for paired tests
  std::uint64_t seed = 0;
  bool uniform_fallback = false;  //!< any trial hit the degenerate uniform path
};

//! Run the full sampling pipeline n_trials times and aggregate sample-to-
//! surface distances and per-interval hit frequencies. Scenes without a
//! surface measure distance to the extent midpoint.
inline ConcentrationReport concentration(const DensityScene& scene,
                                         KernelKind kind,
                                         const PipelineOptions& opts)
{
  if (opts.n_coarse < 2 || opts.n_fine < 1 || opts.n_trials < 1) {
    throw std::invalid_argument("concentration: counts must be positive");
  }
  const std::vector<double> surfaces = scene.surfaces();
  const auto distance_to_surface = [&](double t) {
    if (surfaces.empty()) return std::abs(t - scene.extent_midpoint());
    double best = std::abs(t - surfaces[0]);
    for (double s : surfaces) best = std::min(best, std::abs(t - s));
    return best;
  };

  ConcentrationReport report;
  report.kind = kind;
  report.seed = opts.seed;
  report.interval_frequency.assign(static_cast<std::size_t>(opts.n_coarse - 1), 0.0);
  report.trial_mean_distance.reserve(static_cast<std::size_t>(opts.n_trials));

  double distance_sum = 0.0;
  for (int trial = 0; trial < opts.n_trials; ++trial) {
    const std::uint64_t trial_seed = derive_seed(opts.seed, static_cast<std::uint64_t>(trial));
    RayWeights coarse =
        scene.coarse_stage(opts.n_coarse, opts.jitter, derive_seed(trial_seed, 0));
    report.uniform_fallback |= coarse.weight_sum() == 0.0;
    if (opts.use_maxblur) coarse = maxblur(coarse);
    const RayPdf pdf = build_pdf(coarse, kind);
    const SampleBatch batch =
        sample(pdf, opts.n_fine, SampleMode::stratified, derive_seed(trial_seed, 1));
    report.uniform_fallback |= batch.uniform_fallback;

    double trial_sum = 0.0;
    for (double position : batch.positions) {
      trial_sum += distance_to_surface(position);
      report.interval_frequency[pdf.interval_index(position)] += 1.0;
    }
    report.trial_mean_distance.push_back(trial_sum / static_cast<double>(opts.n_fine));
    distance_sum += trial_sum;
    report.sample_count += opts.n_fine;
  }
  report.mean_distance = distance_sum / static_cast<double>(report.sample_count);
  for (double& f : report.interval_frequency) {
    f /= static_cast<double>(report.sample_count);
  }
  return report;
}

//! Rendering-error statistics of the sampled estimator against the exact
//! reference color.
struct RenderErrorStats
{
  KernelKind kind = KernelKind::constant;
  double reference = 0.0;
  double mean_abs_error = 0.0;
  double stddev_abs_error = 0.0;          //!< sample standard deviation
  std::vector<double> trial_abs_error;    //!< one entry per trial, for paired tests
  std::uint64_t seed = 0;
  bool uniform_fallback = false;
};

inline RenderErrorStats render_error(const DensityScene& scene,
                                     KernelKind kind,
                                     const PipelineOptions& opts)
{
  if (opts.n_coarse < 2 || opts.n_fine < 2 || opts.n_trials < 1) {
    throw std::invalid_argument("render_error: need n_fine >= 2 and positive counts");
  }
  RenderErrorStats stats;
  stats.kind = kind;
  stats.seed = opts.seed;
  stats.reference = scene.render_reference();
  stats.trial_abs_error.reserve(static_cast<std::size_t>(opts.n_trials));

  for (int trial = 0; trial < opts.n_trials; ++trial) {
    const std::uint64_t trial_seed = derive_seed(opts.seed, static_cast<std::uint64_t>(trial));
    RayWeights coarse =
        scene.coarse_stage(opts.n_coarse, opts.jitter, derive_seed(trial_seed, 0));
    if (opts.use_maxblur) coarse = maxblur(coarse);
    const RayPdf pdf = build_pdf(coarse, kind);
    const SampleBatch batch =
        sample(pdf, opts.n_fine, SampleMode::stratified, derive_seed(trial_seed, 1));
    stats.uniform_fallback |= batch.uniform_fallback;
    stats.trial_abs_error.push_back(std::abs(scene.render_with_samples(batch) - stats.reference));
  }

  double sum = 0.0;
  for (double e : stats.trial_abs_error) sum += e;
  stats.mean_abs_error = sum / static_cast<double>(opts.n_trials);
  double var = 0.0;
  for (double e : stats.trial_abs_error) {
    var += (e - stats.mean_abs_error) * (e - stats.mean_abs_error);
  }
  stats.stddev_abs_error =
      opts.n_trials > 1 ? std::sqrt(var / static_cast<double>(opts.n_trials - 1)) : 0.0;
  return stats;
}

//! Two-sided Kolmogorov-Smirnov statistic of sorted samples against a CDF.
template <typename Cdf>
double ks_statistic(std::span<const double> sorted_samples, const Cdf& cdf)
{
  if (sorted_samples.empty()) {
    throw std::invalid_argument("ks_statistic: need at least one sample");
  }
  const double n = static_cast<double>(sorted_samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted_samples.size(); ++i) {
    const double f = cdf(sorted_samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
  }
  return d;
}

//! One-sided sign test: probability that at least n_pos of n_total fair
//! coin flips land positive. Exact binomial tail, evaluated in log space.
inline double sign_test_pvalue(int n_pos, int n_total)
{
  if (n_total < 1 || n_pos < 0 || n_pos > n_total) {
    throw std::invalid_argument("sign_test_pvalue: need 0 <= n_pos <= n_total, n_total >= 1");
  }
  const double log_half_n = static_cast<double>(n_total) * std::log(0.5);
  const double lgamma_n1 = std::lgamma(static_cast<double>(n_total) + 1.0);
  double p = 0.0;
  for (int k = n_pos; k <= n_total; ++k) {
    const double log_term = lgamma_n1 - std::lgamma(static_cast<double>(k) + 1.0) -
                            std::lgamma(static_cast<double>(n_total - k) + 1.0) + log_half_n;
    p += std::exp(log_term);
  }
  return std::min(p, 1.0);
}

//! Count of strictly-smaller pairs for a paired one-sided sign test that
//! `lhs < rhs`; ties are dropped. Returns {n_pos, n_effective}.
inline std::pair<int, int> paired_wins(std::span<const double> lhs, std::span<const double> rhs)
{
  if (lhs.size() != rhs.size()) {
    throw std::invalid_argument("paired_wins: mismatched lengths");
  }
  int pos = 0;
  int effective = 0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    if (lhs[i] == rhs[i]) continue;
    ++effective;
    if (lhs[i] < rhs[i]) ++pos;
  }
  return {pos, effective};
}

}  // namespace l0s
