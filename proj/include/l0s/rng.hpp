// Copyright (c) 2026 The l0s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace l0s {

//! splitmix64 mixing step; used to derive well-separated child seeds from a
//! master seed without correlated low bits.
inline std::uint64_t mix_seed(std::uint64_t state)
{
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

//! Child seed for stream `stream` of a master seed. Deterministic;
//! distinct streams give statistically independent generators.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream)
{
  return mix_seed(master + stream * 0x9e3779b97f4a7c15ull);
}

//! Deterministic uniform generator.
//!
//! Wraps std::mt19937_64 (whose output sequence is fixed by the standard)
//! with an explicit 53-bit mapping to [0,1). Avoids
//! std::uniform_real_distribution, whose output is implementation-defined;
//! this class produces bit-identical streams on every platform.
class Rng
{
public:
  explicit Rng(std::uint64_t seed)
    : gen_(seed)
  {
  }

  std::uint64_t next_u64() { return gen_(); }

  //! Uniform double in [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

private:
  std::mt19937_64 gen_;
};

}  // namespace l0s
