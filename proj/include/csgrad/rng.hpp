#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace csgrad::rng {

// All randomness in this project flows through SplitMix64: a counter is
// advanced by the 64-bit golden ratio and pushed through the finalizer
// below (Steele, Lea & Flood 2014; the same mixer as
// java.util.SplittableRandom).  The generator is stateless apart from the
// counter, so streams can be derived by key folding and replayed on any
// platform.

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Derives a child key from (key, word).  Chained folds give independent
// named streams: fold(fold(master, kTagGradient), round) and so on.
constexpr std::uint64_t fold(std::uint64_t key, std::uint64_t word) noexcept {
  return mix64(key + (word + 1) * kGolden);
}

constexpr std::uint64_t fold(std::uint64_t key, std::uint64_t a,
                             std::uint64_t b) noexcept {
  return fold(fold(key, a), b);
}

constexpr std::uint64_t fold(std::uint64_t key, std::uint64_t a,
                             std::uint64_t b, std::uint64_t c) noexcept {
  return fold(fold(fold(key, a), b), c);
}

// Stream tags.  Every consumer folds exactly one of these between the
// seed it was handed and the values it draws, which keeps streams for
// different purposes disjoint even when they share a trial key.
inline constexpr std::uint64_t kTagProblem = 1;   // synthetic problem build
inline constexpr std::uint64_t kTagMatrix = 2;    // sensing row sampling
inline constexpr std::uint64_t kTagGradient = 3;  // per (round, device) noise
inline constexpr std::uint64_t kTagChannel = 4;   // per-round channel noise
inline constexpr std::uint64_t kTagTrial = 5;     // trial index under a master seed
inline constexpr std::uint64_t kTagSignal = 6;    // recon-bench signal draws
inline constexpr std::uint64_t kTagSketch = 7;    // count-sketch hash family
inline constexpr std::uint64_t kTagSweep = 8;     // sweep entry separation

class Stream {
 public:
  explicit Stream(std::uint64_t key) noexcept : state_(key) {}

  std::uint64_t next_u64() noexcept {
    state_ += kGolden;
    return mix64(state_);
  }

  // Uniform on [0, 1) with 53-bit resolution.
  double next_unit() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool next_bernoulli(double p) noexcept { return next_unit() < p; }

  // Uniform on [0, bound) via masked rejection; exact for any bound >= 1.
  std::uint64_t next_below(std::uint64_t bound) noexcept {
    std::uint64_t mask = bound - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    for (;;) {
      const std::uint64_t r = next_u64() & mask;
      if (r < bound) return r;
    }
  }

  // Standard normal via Box-Muller; the paired value is cached so a run
  // of draws consumes one uniform pair per two samples.
  double next_gaussian() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // (0, 1] for the log argument, [0, 1) for the angle.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  void fill_gaussian(std::vector<double>& out) noexcept {
    for (double& v : out) v = next_gaussian();
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// First k entries of a seeded uniform permutation of [0, n), returned
// sorted ascending.  Partial Fisher-Yates, one swap per drawn element.
std::vector<std::uint32_t> sample_without_replacement(std::size_t n,
                                                      std::size_t k,
                                                      Stream& stream);

}  // namespace csgrad::rng
