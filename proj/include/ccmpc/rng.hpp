// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace ccmpc {

/// All randomness in the toolkit flows through std::mt19937_64.  Substreams
/// (per agent, per sample, per Monte-Carlo realization) are derived by mixing
/// the user seed with stream tags through splitmix64 so that results do not
/// depend on the order in which streams are consumed.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a) {
  return splitmix64(seed ^ splitmix64(a));
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return mix_seed(mix_seed(seed, a), b);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace ccmpc
