// Copyright (c) 2026 The l0s Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "l0s/hvs_reference.hpp"
#include "l0s/ray_pdf.hpp"
#include "l0s/rng.hpp"

using namespace l0s;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinULP;

namespace {

RayWeights random_ray(Rng& rng, std::size_t knots, double w_lo = 0.01, double w_hi = 1.0)
{
  RayWeights rw;
  rw.t.resize(knots);
  rw.w.resize(knots);
  rw.t[0] = 0.0;
  for (std::size_t i = 1; i < knots; ++i) {
    rw.t[i] = rw.t[i - 1] + 0.25 + rng.uniform01();
  }
  for (auto& w : rw.w) w = w_lo + (w_hi - w_lo) * rng.uniform01();
  return rw;
}

double total_variation(const std::vector<double>& v)
{
  double tv = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) tv += std::abs(v[i] - v[i - 1]);
  return tv;
}

}  // namespace

TEST_CASE("compute_weights trivial cases")
{
  const std::vector<double> t{0.0, 0.5, 1.0, 1.5};

  SECTION("zero density gives zero weights")
  {
    const RayWeights rw = compute_weights(std::vector<double>{0, 0, 0, 0}, t);
    for (double w : rw.w) CHECK(w == 0.0);
  }

  SECTION("single absorbing knot")
  {
    // One-term product: weight 1 - e^{-sigma delta} at the knot, zero
    // elsewhere since nothing else absorbs.
    const RayWeights rw = compute_weights(std::vector<double>{0, 2, 0, 0}, t);
    CHECK(rw.w[0] == 0.0);
    CHECK_THAT(rw.w[1], WithinAbs(1.0 - std::exp(-1.0), 1e-15));
    CHECK(rw.w[2] == 0.0);
    CHECK(rw.w[3] == 0.0);
  }

  SECTION("two absorbing knots attenuate downstream")
  {
    const RayWeights rw = compute_weights(std::vector<double>{2, 2, 0, 0}, t);
    const double alpha = 1.0 - std::exp(-1.0);
    CHECK_THAT(rw.w[0], WithinAbs(alpha, 1e-15));
    CHECK_THAT(rw.w[1], WithinAbs(alpha * (1.0 - alpha), 1e-15));
  }
}

TEST_CASE("compute_weights conserves total absorption")
{
  // Telescoping identity: sum w_i = 1 - exp(-sum sigma_i delta_i), with the
  // tail surrogate in both sides.
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform01() * 30);
    std::vector<double> t(n), sigma(n);
    t[0] = rng.uniform01();
    for (std::size_t i = 1; i < n; ++i) t[i] = t[i - 1] + 0.05 + rng.uniform01();
    for (auto& s : sigma) s = 3.0 * rng.uniform01();
    const RayWeights rw = compute_weights(sigma, t);

    double optical_depth = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      optical_depth += sigma[i] * ((i + 1 < n) ? t[i + 1] - t[i] : tail_delta);
    }
    CHECK_THAT(rw.weight_sum(), WithinAbs(1.0 - std::exp(-optical_depth), 1e-9));
    CHECK(rw.weight_sum() <= 1.0 + 1e-6);
  }
}

TEST_CASE("compute_weights rejects bad inputs")
{
  CHECK_THROWS_AS(compute_weights(std::vector<double>{1.0}, std::vector<double>{0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(compute_weights(std::vector<double>{-1.0, 0.0}, std::vector<double>{0.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(compute_weights(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(compute_weights(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 0.5}),
                  std::invalid_argument);
}

TEST_CASE("maxblur frozen examples")
{
  const std::vector<double> t{0.0, 1.0, 2.0};

  CHECK(maxblur({t, {0.0, 0.0, 0.0}}).w == std::vector<double>{0.01, 0.01, 0.01});
  // Exact per the padding rule: half the one-sided max plus the floor.
  CHECK(maxblur({t, {0.0, 1.0, 0.0}}).w == std::vector<double>{0.51, 1.01, 0.51});
  // Constant input shifts by the floor.
  for (double w : maxblur({t, {0.2, 0.2, 0.2}}).w) CHECK_THAT(w, WithinULP(0.21, 1));
}

TEST_CASE("maxblur floor, knots, and variation bound")
{
  Rng rng(32);
  for (int trial = 0; trial < 500; ++trial) {
    RayWeights rw = random_ray(rng, 2 + static_cast<std::size_t>(rng.uniform01() * 20), 0.0, 1.0);
    const RayWeights out = maxblur(rw);
    CHECK(out.t == rw.t);
    for (double w : out.w) CHECK(w >= 0.01);
    CHECK(total_variation(out.w) <= total_variation(rw.w) + 1e-12);
  }
}

TEST_CASE("build_pdf masses and cumulative sums")
{
  SECTION("flat unit density over length two")
  {
    const RayPdf pdf = build_pdf({{0.0, 2.0}, {1.0, 1.0}}, KernelKind::constant);
    CHECK(pdf.total_mass == 2.0);
    CHECK(pdf.cum_mass == std::vector<double>{0.0, 2.0});
  }

  SECTION("exponential mass equals the logarithmic mean times the length")
  {
    const RayPdf pdf = build_pdf({{0.0, 1.0}, {1.0, std::exp(1.0)}}, KernelKind::exponential);
    CHECK_THAT(pdf.total_mass, WithinAbs(std::exp(1.0) - 1.0, 1e-14));
  }

  SECTION("argmax-delta puts unit mass right of the best knot")
  {
    const RayPdf pdf = build_pdf({{0.0, 1.0, 2.0}, {0.1, 0.9, 0.1}}, KernelKind::argmax_delta);
    CHECK(pdf.interval_mass == std::vector<double>{0.0, 1.0});
    CHECK(pdf.total_mass == 1.0);
  }

  SECTION("argmax on the last knot falls back to the left interval")
  {
    const RayPdf pdf = build_pdf({{0.0, 1.0, 2.0}, {0.1, 0.2, 0.9}}, KernelKind::argmax_delta);
    CHECK(pdf.interval_mass == std::vector<double>{0.0, 1.0});
  }

  SECTION("argmax ties resolve to the lowest knot index")
  {
    const RayPdf pdf = build_pdf({{0.0, 1.0, 2.0, 3.0}, {0.2, 0.9, 0.9, 0.1}},
                                 KernelKind::argmax_delta);
    CHECK(pdf.interval_mass == std::vector<double>{0.0, 1.0, 0.0});
  }

  SECTION("invariants hold on random rays")
  {
    Rng rng(33);
    for (int trial = 0; trial < 200; ++trial) {
      const RayWeights rw = random_ray(rng, 2 + static_cast<std::size_t>(rng.uniform01() * 30),
                                       0.0, 1.0);
      for (KernelKind kind : {KernelKind::constant, KernelKind::linear, KernelKind::exponential,
                              KernelKind::inverse}) {
        const RayPdf pdf = build_pdf(rw, kind);
        CHECK(pdf.cum_mass.front() == 0.0);
        CHECK(pdf.cum_mass.back() == pdf.total_mass);
        CHECK(pdf.total_mass > 0.0);
        for (std::size_t i = 0; i + 1 < pdf.cum_mass.size(); ++i) {
          CHECK(pdf.interval_mass[i] >= 0.0);
          CHECK(pdf.cum_mass[i] <= pdf.cum_mass[i + 1]);
        }
      }
    }
  }
}

TEST_CASE("sampling a uniform pdf with zero jitter hits the CDF quarters")
{
  const RayPdf pdf = build_pdf({{0.0, 4.0}, {1.0, 1.0}}, KernelKind::constant);
  const std::vector<double> levels{0.0, 0.25, 0.5, 0.75};
  const std::vector<double> positions = invert_levels(pdf, levels);
  CHECK_THAT(positions[0], WithinAbs(0.0, 1e-15));
  CHECK_THAT(positions[1], WithinAbs(1.0, 1e-15));
  CHECK_THAT(positions[2], WithinAbs(2.0, 1e-15));
  CHECK_THAT(positions[3], WithinAbs(3.0, 1e-15));
}

TEST_CASE("level zero maps to the start of the support")
{
  Rng rng(34);
  const RayWeights rw = random_ray(rng, 8);
  for (KernelKind kind : {KernelKind::constant, KernelKind::linear, KernelKind::exponential,
                          KernelKind::inverse}) {
    const RayPdf pdf = build_pdf(rw, kind);
    const std::vector<double> positions = invert_levels(pdf, std::vector<double>{0.0});
    CHECK(positions[0] == rw.t.front());
  }
  // argmax-delta's support is one interval; its inverse CDF at zero is that
  // interval's start, not the ray start.
  const RayPdf delta = build_pdf(rw, KernelKind::argmax_delta);
  const std::size_t best = static_cast<std::size_t>(
      std::max_element(rw.w.begin(), rw.w.end()) - rw.w.begin());
  const std::size_t iv = best + 1 < rw.size() ? best : rw.size() - 2;
  CHECK(invert_levels(delta, std::vector<double>{0.0})[0] == rw.t[iv]);
}

TEST_CASE("sampling golden value for a steep exponential interval")
{
  // One unit interval with endpoint weights (0.01, 1); the u = 0.5 sample
  // must land at the bisection-oracle inversion of half the mass
  // (frozen in the kernels suite).
  const RayPdf pdf = build_pdf({{0.0, 1.0}, {0.01, 1.0}}, KernelKind::exponential);
  const std::vector<double> positions = invert_levels(pdf, std::vector<double>{0.5});
  CHECK_THAT(positions[0], WithinAbs(0.8516456890593247, 1e-12));
}

TEST_CASE("stratified batches put one sample in each CDF slice")
{
  Rng rng(35);
  for (int trial = 0; trial < 20; ++trial) {
    const RayWeights rw = random_ray(rng, 12);
    for (KernelKind kind : {KernelKind::constant, KernelKind::exponential, KernelKind::inverse}) {
      const RayPdf pdf = build_pdf(rw, kind);
      const int count = 64;
      const SampleBatch batch = sample(pdf, count, SampleMode::stratified, trial * 101u + 7u);
      REQUIRE(batch.positions.size() == 64);
      for (int k = 0; k < count; ++k) {
        const double f = pdf.cdf(batch.positions[static_cast<std::size_t>(k)]);
        CHECK(f >= k / 64.0 - 1e-9);
        CHECK(f <= (k + 1) / 64.0 + 1e-9);
      }
    }
  }
}

TEST_CASE("samples are sorted, in range, and deterministic")
{
  Rng rng(36);
  const RayWeights rw = random_ray(rng, 16);
  for (SampleMode mode : {SampleMode::stratified, SampleMode::independent}) {
    const RayPdf pdf = build_pdf(rw, KernelKind::exponential);
    const SampleBatch one = sample(pdf, 500, mode, 99);
    const SampleBatch two = sample(pdf, 500, mode, 99);
    CHECK(one.positions == two.positions);  // bit-identical
    CHECK(std::is_sorted(one.positions.begin(), one.positions.end()));
    for (double p : one.positions) {
      CHECK(p >= rw.t.front());
      CHECK(p <= rw.t.back());
    }
    const SampleBatch other = sample(pdf, 500, mode, 100);
    CHECK(one.positions != other.positions);
  }
}

TEST_CASE("empirical interval frequencies match the masses")
{
  Rng rng(37);
  const RayWeights rw = random_ray(rng, 9);
  for (KernelKind kind : {KernelKind::constant, KernelKind::linear, KernelKind::exponential,
                          KernelKind::inverse}) {
    const RayPdf pdf = build_pdf(rw, kind);
    const int count = 200000;
    const SampleBatch batch = sample(pdf, count, SampleMode::independent, 4242);
    std::vector<int> hits(pdf.interval_mass.size(), 0);
    for (double p : batch.positions) ++hits[pdf.interval_index(p)];
    for (std::size_t i = 0; i < hits.size(); ++i) {
      const double expected = pdf.interval_mass[i] / pdf.total_mass;
      const double sigma = std::sqrt(expected * (1.0 - expected) / count);
      CHECK_THAT(static_cast<double>(hits[i]) / count, WithinAbs(expected, 3.5 * sigma + 1e-9));
    }
  }
}

TEST_CASE("Kolmogorov-Smirnov sanity at moderate sample counts")
{
  Rng rng(38);
  const RayWeights rw = random_ray(rng, 17);
  for (KernelKind kind : {KernelKind::constant, KernelKind::linear, KernelKind::exponential,
                          KernelKind::inverse}) {
    const RayPdf pdf = build_pdf(rw, kind);
    const SampleBatch batch = sample(pdf, 100000, SampleMode::independent, 555);
    double d = 0.0;
    const double n = static_cast<double>(batch.positions.size());
    for (std::size_t i = 0; i < batch.positions.size(); ++i) {
      const double f = pdf.cdf(batch.positions[i]);
      d = std::max(d, std::abs(f - static_cast<double>(i) / n));
      d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    }
    CHECK(d < 0.0065);
  }
}

TEST_CASE("constant kernel reproduces classical HVS inversion")
{
  Rng rng(39);
  for (int trial = 0; trial < 50; ++trial) {
    const RayWeights rw = random_ray(rng, 10);
    const RayPdf pdf = build_pdf(rw, KernelKind::constant);
    const std::vector<double> levels = uniform_levels(128, SampleMode::stratified, trial + 1u);
    std::vector<double> mine = invert_levels(pdf, levels);
    std::sort(mine.begin(), mine.end());
    const std::vector<double> oracle = hvs_reference_positions(rw.t, rw.w, levels);
    for (std::size_t i = 0; i < mine.size(); ++i) {
      CHECK_THAT(mine[i], WithinAbs(oracle[i], 1e-12));
    }
  }
}

TEST_CASE("argmax-delta concentrates every sample in one interval")
{
  const RayPdf pdf = build_pdf({{0.0, 1.0, 2.0, 3.0}, {0.1, 0.9, 0.2, 0.1}},
                               KernelKind::argmax_delta);
  const SampleBatch batch = sample(pdf, 1000, SampleMode::independent, 7);
  for (double p : batch.positions) {
    CHECK(p >= 1.0);
    CHECK(p <= 2.0);
  }
}

TEST_CASE("empty rays fall back to flagged uniform sampling")
{
  const RayWeights rw{{0.0, 1.0, 2.0}, {0.0, 0.0, 0.0}};
  const RayPdf pdf = build_pdf(rw, KernelKind::exponential);
  CHECK(pdf.empty_input);
  CHECK(pdf.total_mass > 0.0);  // clamping keeps the pdf well-formed

  const SampleBatch batch = sample(pdf, 4, SampleMode::stratified, 3);
  CHECK(batch.uniform_fallback);
  for (double p : batch.positions) {
    CHECK(p >= 0.0);
    CHECK(p <= 2.0);
  }

  // Any positive raw weight disables the fallback.
  const SampleBatch live = sample(build_pdf({{0.0, 1.0, 2.0}, {0.0, 0.5, 0.0}},
                                            KernelKind::exponential),
                                  4, SampleMode::stratified, 3);
  CHECK_FALSE(live.uniform_fallback);
}

TEST_CASE("sample argument validation")
{
  const RayPdf pdf = build_pdf({{0.0, 1.0}, {0.5, 0.5}}, KernelKind::constant);
  CHECK_THROWS_AS(sample(pdf, 0, SampleMode::stratified, 1), std::invalid_argument);
  CHECK_THROWS_AS(invert_levels(pdf, std::vector<double>{1.0}), std::domain_error);
  CHECK_THROWS_AS(invert_levels(pdf, std::vector<double>{-0.1}), std::domain_error);
  CHECK_THROWS_AS(build_pdf({{0.0}, {0.5}}, KernelKind::constant), std::invalid_argument);
}
