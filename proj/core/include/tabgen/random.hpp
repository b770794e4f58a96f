#pragma once

#include <cstdint>
#include <random>

namespace tabgen {

/// Seeded random stream. Passed explicitly wherever randomness is consumed;
/// copying an Rng forks an identical stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  double normal() { return normal_(engine_); }

  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  bool bernoulli(double p) { return std::bernoulli_distribution(p)(engine_); }

  std::mt19937_64& engine() { return engine_; }

  /// Derives an independent child seed; used to split one user seed into
  /// per-purpose streams (initialisation, shuffling, noise).
  std::uint64_t split() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace tabgen
