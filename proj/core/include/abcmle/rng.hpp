#pragma once

#include <cstdint>
#include <random>

namespace abcmle {

// splitmix64 finalizer; used both to key independent substreams from a master
// seed and as a cheap avalanche for combining key material.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e595ULL;
  z = (z ^ (z >> 27)) * 0x94d4a2b9d25269b1ULL;
  return z ^ (z >> 31);
}

// Combine a seed with up to three key words into one 64-bit substream seed.
// Each distinct (seed, k1, k2, k3) tuple yields an effectively independent
// stream, which is how the drivers give every pass / observation its own
// reproducible randomness regardless of evaluation order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k1,
                                 std::uint64_t k2 = 0, std::uint64_t k3 = 0) {
  std::uint64_t s = mix64(seed ^ 0x6a09e667f3bcc908ULL);
  s = mix64(s ^ k1);
  s = mix64(s ^ k2);
  s = mix64(s ^ k3);
  return s;
}

// Deterministic random stream. A thin wrapper over std::mt19937_64 with the
// handful of draws the samplers need. Instances are cheap enough to create
// per observation or per pass; nothing here is thread-safe, the concurrency
// contract is "one Rng per logical stream".
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng keyed(std::uint64_t seed, std::uint64_t k1, std::uint64_t k2 = 0,
                   std::uint64_t k3 = 0) {
    return Rng(derive_seed(seed, k1, k2, k3));
  }

  std::uint64_t raw() { return engine_(); }

  // Uniform on [0, 1): 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on the open interval (0, 1); safe to pass through log or a
  // quantile function.
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double normal() { return normal_(engine_); }

  // Exponential with rate 1.
  double exponential() { return -std::log(uniform_open()); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace abcmle
