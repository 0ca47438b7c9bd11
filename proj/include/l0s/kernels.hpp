// Copyright (c) 2026 The l0s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <stdexcept>
#include <string>
#include <string_view>

namespace l0s {

//! Families of per-interval interpolants used to extend discrete ray
//! weights into a piecewise density.
//!
//! All kinds except `argmax_delta` define a positive density on the unit
//! interval with closed-form integral and inverse CDF. `argmax_delta` is
//! the degenerate "all mass in the single best interval" rule; it has no
//! per-interval density and only participates in ray-level PDF assembly.
enum class KernelKind
{
  constant,
  linear,
  exponential,
  inverse,
  argmax_delta,
};

inline std::string_view to_string(KernelKind kind)
{
  switch (kind) {
    case KernelKind::constant: return "constant";
    case KernelKind::linear: return "linear";
    case KernelKind::exponential: return "exponential";
    case KernelKind::inverse: return "inverse";
    case KernelKind::argmax_delta: return "argmax-delta";
  }
  throw std::invalid_argument("to_string: unknown KernelKind");
}

inline KernelKind kernel_kind_from_string(std::string_view name)
{
  if (name == "constant") return KernelKind::constant;
  if (name == "linear") return KernelKind::linear;
  if (name == "exponential") return KernelKind::exponential;
  if (name == "inverse") return KernelKind::inverse;
  if (name == "argmax-delta") return KernelKind::argmax_delta;
  throw std::invalid_argument("unknown kernel kind: " + std::string(name));
}

//! Endpoint weights below this are clamped up before kernel construction,
//! so the log-based kernels stay total even for exactly-zero weights.
inline constexpr double min_endpoint_weight = 1e-5;

//! When |ln b - ln a| falls below this, the exponential/inverse closed
//! forms are 0/0 and switch to their constant-kernel limits.
inline constexpr double degenerate_log_ratio = 1e-7;

//! Relative slack accepted on the residual-mass argument of icdf before it
//! counts as out of range.
inline constexpr double icdf_residual_slack = 1e-9;

//! One interpolation kernel on the normalized interval [0,1] with endpoint
//! values eval(0) = a and eval(1) = b.
//!
//! The four usable kinds share this interface:
//!   constant     level (a+b)/2
//!   linear       a + (b-a) s
//!   exponential  a (b/a)^s
//!   inverse      a b / ((a-b) s + b)
//!
//! Endpoints are clamped to min_endpoint_weight at construction, so a and b
//! are strictly positive and every kernel is a valid (unnormalized) density.
//! All member functions are pure.
template <std::floating_point Real = double>
class UnitKernel
{
public:
  //! Clamps raw endpoint weights and validates them.
  UnitKernel(KernelKind kind, Real raw_a, Real raw_b)
    : kind_(kind)
  {
    if (!std::isfinite(raw_a) || !std::isfinite(raw_b)) {
      throw std::invalid_argument("UnitKernel: endpoint weights must be finite");
    }
    a_ = std::max(raw_a, static_cast<Real>(min_endpoint_weight));
    b_ = std::max(raw_b, static_cast<Real>(min_endpoint_weight));
    // log1p form keeps full relative accuracy when a and b are close.
    log_ratio_ = std::log1p((b_ - a_) / a_);
  }

  KernelKind kind() const { return kind_; }
  Real a() const { return a_; }
  Real b() const { return b_; }

  //! ln(b/a); the steepness parameter of the log-based kernels.
  Real log_ratio() const { return log_ratio_; }

  bool degenerate() const { return std::abs(log_ratio_) < static_cast<Real>(degenerate_log_ratio); }

  //! Kernel value at fraction s in [0,1].
  Real eval(Real s) const
  {
    check_fraction(s);
    // The lerp and pow forms are endpoint-exact to a couple of ULPs even
    // when a and b differ by orders of magnitude.
    switch (kind_) {
      case KernelKind::constant: return level();
      case KernelKind::linear: return a_ * (1 - s) + b_ * s;
      case KernelKind::exponential: return a_ * std::pow(b_ / a_, s);
      case KernelKind::inverse: return a_ * b_ / (b_ * (1 - s) + a_ * s);
      case KernelKind::argmax_delta: break;
    }
    throw std::invalid_argument("UnitKernel: argmax-delta has no per-interval density");
  }

  //! Total mass over [0,1]. Exponential yields the logarithmic mean
  //! (b-a)/(ln b - ln a); inverse yields a b (ln b - ln a)/(b-a); linear and
  //! constant yield the arithmetic mean. Near a = b the log-based forms
  //! return the shared limit a.
  Real integral() const
  {
    switch (kind_) {
      case KernelKind::constant:
      case KernelKind::linear: return level();
      case KernelKind::exponential:
        return degenerate() ? a_ : (b_ - a_) / log_ratio_;
      case KernelKind::inverse:
        return degenerate() ? a_ : a_ * b_ * log_ratio_ / (b_ - a_);
      case KernelKind::argmax_delta: break;
    }
    throw std::invalid_argument("UnitKernel: argmax-delta has no per-interval density");
  }

  //! Partial mass: integral of the kernel over [0, x].
  Real cdf(Real x) const
  {
    check_fraction(x);
    switch (kind_) {
      case KernelKind::constant: return level() * x;
      case KernelKind::linear: return (a_ + static_cast<Real>(0.5) * (b_ - a_) * x) * x;
      case KernelKind::exponential:
        return degenerate() ? a_ * x : a_ * std::expm1(log_ratio_ * x) / log_ratio_;
      case KernelKind::inverse:
        return degenerate() ? a_ * x
                            : a_ * b_ / (a_ - b_) * std::log1p((a_ - b_) * x / b_);
      case KernelKind::argmax_delta: break;
    }
    throw std::invalid_argument("UnitKernel: argmax-delta has no per-interval density");
  }

  //! Inverse of cdf: the position x in [0,1] holding residual mass r, i.e.
  //! the solution of integral over [0,x] = r. Each kind inverts in closed
  //! form; no iteration anywhere.
  Real icdf(Real r) const
  {
    const Real total = integral();
    const Real slack = static_cast<Real>(icdf_residual_slack) * std::max(total, static_cast<Real>(1));
    if (!std::isfinite(r) || r < -slack || r > total + slack) {
      throw std::domain_error("UnitKernel::icdf: residual mass out of [0, integral]");
    }
    r = std::clamp(r, static_cast<Real>(0), total);
    Real x;
    switch (kind_) {
      case KernelKind::constant:
        x = r / level();
        break;
      case KernelKind::linear:
        // Stable root of (b-a)/2 x^2 + a x = r; the conjugate form avoids
        // cancellation for small r and small |b-a|.
        x = 2 * r / (a_ + std::sqrt(std::max(a_ * a_ + 2 * (b_ - a_) * r, static_cast<Real>(0))));
        break;
      case KernelKind::exponential:
        x = degenerate() ? r / a_ : std::log1p(r * log_ratio_ / a_) / log_ratio_;
        break;
      case KernelKind::inverse:
        x = degenerate() ? r / a_ : b_ / (a_ - b_) * std::expm1(r * (a_ - b_) / (a_ * b_));
        break;
      case KernelKind::argmax_delta:
      default:
        throw std::invalid_argument("UnitKernel: argmax-delta has no per-interval density");
    }
    return std::clamp(x, static_cast<Real>(0), static_cast<Real>(1));
  }

  //! Barycenter of the kernel's mass: integral of s w(s) over integral of
  //! w(s). 1/2 for symmetric kernels; pushed toward the heavier endpoint
  //! otherwise. The exponential and inverse kinds agree exactly here.
  Real bias() const
  {
    const Real c = log_ratio_;
    switch (kind_) {
      case KernelKind::constant: return static_cast<Real>(0.5);
      case KernelKind::linear: return (a_ + 2 * b_) / (3 * (a_ + b_));
      case KernelKind::exponential: {
        if (degenerate()) return static_cast<Real>(0.5);
        if (std::abs(c) < static_cast<Real>(0.05)) return bias_series(c);
        // (e^c (c-1) + 1) / (c (e^c - 1)), rearranged by e^{-c} for c > 0
        // so large ratios cannot overflow.
        if (c > 0) {
          return ((c - 1) + std::exp(-c)) / (c * -std::expm1(-c));
        }
        return (std::exp(c) * (c - 1) + 1) / (c * std::expm1(c));
      }
      case KernelKind::inverse: {
        if (degenerate()) return static_cast<Real>(0.5);
        if (std::abs(c) < static_cast<Real>(0.05)) return bias_series(c);
        return b_ / (b_ - a_) - 1 / c;
      }
      case KernelKind::argmax_delta: break;
    }
    throw std::invalid_argument("UnitKernel::bias: argmax-delta has no barycenter");
  }

private:
  Real level() const { return static_cast<Real>(0.5) * (a_ + b_); }

  //! Taylor expansion of the shared exponential/inverse barycenter around
  //! c = 0; both closed forms cancel badly there.
  static Real bias_series(Real c)
  {
    const Real c2 = c * c;
    return static_cast<Real>(0.5) + c / 12 - c * c2 / 720 + c2 * c2 * c / 30240;
  }

  void check_fraction(Real s) const
  {
    if (!(s >= 0 && s <= 1)) {
      throw std::domain_error("UnitKernel: fraction argument outside [0,1]");
    }
  }

  KernelKind kind_;
  Real a_;
  Real b_;
  Real log_ratio_;
};

using UnitKernelD = UnitKernel<double>;

}  // namespace l0s
