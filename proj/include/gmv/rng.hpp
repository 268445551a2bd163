#pragma once

#include <cstdint>

#include "gmv/wideint.hpp"

namespace gmv {

/// Deterministic 64-bit stream (splitmix64). Used everywhere randomness is
/// needed so that runs are reproducible across platforms; std:: distributions
/// are deliberately avoided.
struct SplitMix64 {
  u64 state = 0;

  explicit SplitMix64(u64 seed = 0) : state(seed) {}

  u64 next() {
    u64 z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // low word first, then high word
  u128 next128() {
    u64 lo = next();
    u64 hi = next();
    return (u128(hi) << 64) | lo;
  }
};

}  // namespace gmv
