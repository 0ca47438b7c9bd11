// Copyright (c) 2026 The l0s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "l0s/quadrature.hpp"
#include "l0s/ray_pdf.hpp"
#include "l0s/rng.hpp"

namespace l0s {

//! Gaussian density lobe: peak * exp(-(t - center)^2 / (2 width^2)).
struct GaussianBump
{
  double center = 0.0;
  double width = 1.0;
  double peak = 0.0;
};

//! Constant density slab: `level` on [entry, exit], zero outside.
struct BoxSlab
{
  double entry = 0.0;
  double exit = 1.0;
  double level = 0.0;
};

//! Linear color ramp over the ray extent; equal endpoints give a constant
//! color. Values are confined to [0,1].
struct ColorRamp
{
  double near_value = 1.0;
  double far_value = 1.0;
};

//! Analytic 1D density field over a ray extent [t_near, t_far], with known
//! surface positions and exact transmittance. Stands in for a trained
//! density network: the coarse stage reads densities straight off the
//! profile, and render_reference gives the exact rendered color.
//!
//! Box slabs have fully closed-form transmittance; Gaussian profiles use
//! the error-function antiderivative, which is exact to rounding.
class DensityScene
{
public:
  using Profile = std::variant<BoxSlab, std::vector<GaussianBump>>;

  DensityScene(Profile profile, double t_near, double t_far, ColorRamp color = {})
    : profile_(std::move(profile))
    , t_near_(t_near)
    , t_far_(t_far)
    , color_(color)
  {
    if (!(std::isfinite(t_near_) && std::isfinite(t_far_) && t_near_ < t_far_)) {
      throw std::invalid_argument("DensityScene: need finite t_near < t_far");
    }
    if (!(color_.near_value >= 0.0 && color_.near_value <= 1.0 &&
          color_.far_value >= 0.0 && color_.far_value <= 1.0)) {
      throw std::invalid_argument("DensityScene: colors must lie in [0,1]");
    }
    if (const auto* box = std::get_if<BoxSlab>(&profile_)) {
      if (!(box->level >= 0.0) || !std::isfinite(box->level)) {
        throw std::invalid_argument("DensityScene: box level must be finite and non-negative");
      }
      if (!(box->entry < box->exit)) {
        throw std::invalid_argument("DensityScene: box entry must precede exit");
      }
      if (box->level > 0.0 && !(box->entry > t_near_ && box->entry < t_far_)) {
        throw std::invalid_argument("DensityScene: box entry must lie strictly inside the extent");
      }
    } else {
      for (const auto& bump : std::get<std::vector<GaussianBump>>(profile_)) {
        if (!(bump.width > 0.0) || !(bump.peak >= 0.0) || !std::isfinite(bump.peak)) {
          throw std::invalid_argument("DensityScene: bump width must be positive, peak non-negative");
        }
        if (bump.peak > 0.0 && !(bump.center > t_near_ && bump.center < t_far_)) {
          throw std::invalid_argument("DensityScene: bump center must lie strictly inside the extent");
        }
      }
    }
  }

  double t_near() const { return t_near_; }
  double t_far() const { return t_far_; }
  double extent_midpoint() const { return 0.5 * (t_near_ + t_far_); }

  //! Known surface positions: slab entry or bump centers (zero-density
  //! profiles have none).
  std::vector<double> surfaces() const
  {
    std::vector<double> s;
    if (const auto* box = std::get_if<BoxSlab>(&profile_)) {
      if (box->level > 0.0) s.push_back(box->entry);
    } else {
      for (const auto& bump : std::get<std::vector<GaussianBump>>(profile_)) {
        if (bump.peak > 0.0) s.push_back(bump.center);
      }
    }
    return s;
  }

  double color(double t) const
  {
    const double x = (t - t_near_) / (t_far_ - t_near_);
    return color_.near_value + (color_.far_value - color_.near_value) * x;
  }

  //! Density at position t; rejects positions outside the extent.
  double density(double t) const
  {
    check_extent(t);
    if (const auto* box = std::get_if<BoxSlab>(&profile_)) {
      return (t >= box->entry && t <= box->exit) ? box->level : 0.0;
    }
    double sigma = 0.0;
    for (const auto& bump : std::get<std::vector<GaussianBump>>(profile_)) {
      const double z = (t - bump.center) / bump.width;
      sigma += bump.peak * std::exp(-0.5 * z * z);
    }
    return sigma;
  }

  //! Fraction of light surviving from t_near to t: exp of the negative
  //! integrated density, in closed form.
  double transmittance(double t) const
  {
    check_extent(t);
    return std::exp(-optical_depth(t));
  }

  //! Integral of the density over [t_near, t].
  double optical_depth(double t) const
  {
    check_extent(t);
    if (const auto* box = std::get_if<BoxSlab>(&profile_)) {
      const double covered = std::max(0.0, std::min(t, box->exit) - std::max(t_near_, box->entry));
      return box->level * covered;
    }
    double depth = 0.0;
    for (const auto& bump : std::get<std::vector<GaussianBump>>(profile_)) {
      depth += bump_depth(bump, t);
    }
    return depth;
  }

  //! Exact rendered color: integral of w(t) c(t) with w = sigma * T,
  //! by adaptive quadrature split at the profile's breakpoints.
  double render_reference(double abs_tol = 1e-10) const
  {
    const auto integrand = [this](double t) {
      return density(t) * transmittance(t) * color(t);
    };
    return integrate_segmented(integrand, t_near_, t_far_, breakpoints(), abs_tol);
  }

  //! Discrete color estimate from a sorted sample batch: densities at the
  //! sample positions fed through the alpha-compositing weights with the
  //! sample spacings (the last sample carries no interval and is dropped).
  double render_with_samples(const SampleBatch& batch) const
  {
    return render_with_positions(batch.positions);
  }

  double render_with_positions(std::span<const double> positions) const
  {
    if (positions.size() < 2) {
      throw std::invalid_argument("render_with_samples: need at least two samples");
    }
    double transmit = 1.0;
    double color_sum = 0.0;
    for (std::size_t i = 0; i + 1 < positions.size(); ++i) {
      const double delta = positions[i + 1] - positions[i];
      if (delta < 0.0) {
        throw std::invalid_argument("render_with_samples: positions must be sorted");
      }
      const double alpha = -std::expm1(-density(positions[i]) * delta);
      color_sum += alpha * transmit * color(positions[i]);
      transmit *= 1.0 - alpha;
    }
    return color_sum;
  }

  //! Coarse stage of hierarchical sampling: uniform (optionally jittered)
  //! knots over the extent, densities read exactly off the profile, then
  //! compute_weights. Deterministic when jitter is off.
  RayWeights coarse_stage(int n_coarse, bool jitter = false, std::uint64_t seed = 0) const
  {
    if (n_coarse < 2) {
      throw std::invalid_argument("coarse_stage: need at least two knots");
    }
    const std::size_t n = static_cast<std::size_t>(n_coarse);
    std::vector<double> knots(n);
    const double span = t_far_ - t_near_;
    if (jitter) {
      Rng rng(seed);
      for (std::size_t k = 0; k < n; ++k) {
        knots[k] = t_near_ + (static_cast<double>(k) + rng.uniform01()) / static_cast<double>(n) * span;
      }
    } else {
      for (std::size_t k = 0; k < n; ++k) {
        knots[k] = t_near_ + static_cast<double>(k) / static_cast<double>(n - 1) * span;
      }
      knots[n - 1] = t_far_;
    }
    std::vector<double> sigma(n);
    for (std::size_t k = 0; k < n; ++k) sigma[k] = density(knots[k]);
    return compute_weights(sigma, knots);
  }

  //! Positions where the density changes character; quadrature splits here
  //! so narrow features cannot slip between panels.
  std::vector<double> breakpoints() const
  {
    std::vector<double> cuts;
    if (const auto* box = std::get_if<BoxSlab>(&profile_)) {
      cuts = {box->entry, box->exit};
    } else {
      for (const auto& bump : std::get<std::vector<GaussianBump>>(profile_)) {
        for (double k : {-8.0, -1.0, 0.0, 1.0, 8.0}) {
          cuts.push_back(bump.center + k * bump.width);
        }
      }
    }
    return cuts;
  }

  const Profile& profile() const { return profile_; }
  ColorRamp color_ramp() const { return color_; }

private:
  double bump_depth(const GaussianBump& bump, double t) const
  {
    const double inv = 1.0 / (bump.width * std::numbers::sqrt2);
    const double scale = bump.peak * bump.width * std::sqrt(std::numbers::pi / 2.0);
    return scale * (std::erf((t - bump.center) * inv) - std::erf((t_near_ - bump.center) * inv));
  }

  void check_extent(double t) const
  {
    if (!(t >= t_near_ && t <= t_far_)) {
      throw std::domain_error("DensityScene: position outside the ray extent");
    }
  }

  Profile profile_;
  double t_near_;
  double t_far_;
  ColorRamp color_;
};

//! Canonical scene catalog. The three regimes the sampler must cover:
//! a sharp near-opaque surface, a wide ambiguous one, and two partial
//! surfaces giving a bimodal weight function. "zero-density" is the empty
//! ray used by degenerate-path tests.
inline DensityScene make_scene(std::string_view name)
{
  if (name == "sharp-bump") {
    // Surface support (6 widths = 0.06) fits inside one 64-knot coarse
    // interval, so the coarse stage can never localize it on its own.
    return DensityScene(std::vector<GaussianBump>{{2.0, 0.01, 400.0}}, 0.0, 4.0, {1.0, 1.0});
  }
  if (name == "wide-bump") {
    return DensityScene(std::vector<GaussianBump>{{2.0, 0.45, 2.2}}, 0.0, 4.0, {0.8, 0.8});
  }
  if (name == "two-surface") {
    return DensityScene(std::vector<GaussianBump>{{2.0, 0.06, 8.0}, {4.0, 0.08, 30.0}},
                        0.0, 6.0, {0.3, 0.9});
  }
  if (name == "zero-density") {
    return DensityScene(BoxSlab{1.0, 2.0, 0.0}, 0.0, 4.0, {1.0, 1.0});
  }
  throw std::invalid_argument("unknown scene: " + std::string(name));
}

inline const std::vector<std::string>& scene_catalog()
{
  static const std::vector<std::string> names = {"sharp-bump", "wide-bump", "two-surface"};
  return names;
}

}  // namespace l0s
