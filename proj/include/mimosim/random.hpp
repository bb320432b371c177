#ifndef MIMOSIM_RANDOM_HPP
#define MIMOSIM_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

#include "mimosim/types.hpp"

namespace mimosim {

/// SplitMix64 finalizer. Used as the mixing step of substream derivation.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// A seeded pseudo-random stream. Each Monte Carlo trial owns one, so no
/// generator state is ever shared between threads.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Substream keyed by (master, keys...). The seed is
  ///   h0 = splitmix64(master), h_{i+1} = splitmix64(h_i ^ keys[i])
  /// so a trial's draws depend only on its keys, never on scheduling.
  static RandomStream derive(std::uint64_t master,
                             std::initializer_list<std::uint64_t> keys);

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  std::uint64_t bits() { return engine_(); }

  /// Zero-mean circularly-symmetric complex normal with E|z|^2 = variance.
  Complex complex_normal(double variance = 1.0);

  std::mt19937_64& engine() noexcept { return engine_; }

private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace mimosim

#endif // MIMOSIM_RANDOM_HPP
