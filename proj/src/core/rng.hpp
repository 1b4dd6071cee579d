// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTENTFORGE_CORE_RNG_HPP
#define INTENTFORGE_CORE_RNG_HPP

#include <cstdint>
#include <cmath>
#include <string_view>
#include <vector>

namespace intentforge {

// Deterministic splitmix64 stream. The standard library engines/distributions
// are implementation-defined, so everything that must reproduce bit-for-bit
// (batch sampling, k-means++ seeding, fixture generation) goes through this.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n), bias-free via rejection.
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller (one value per call; no cached pair so the
  // stream position is easy to reason about).
  double next_gaussian() {
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[next_below(i)]);
    }
  }

  // Sub-seed for a named stage, so inserting a stage never perturbs siblings.
  std::uint64_t fork_seed(std::string_view stage) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : stage) {
      h ^= static_cast<std::uint8_t>(c);
      h *= 0x100000001b3ULL;
    }
    // Mix with the root state without advancing it.
    std::uint64_t z = state_ ^ h;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view stage) {
  return Rng(root).fork_seed(stage);
}

}  // namespace intentforge

#endif  // INTENTFORGE_CORE_RNG_HPP
