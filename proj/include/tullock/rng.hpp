#pragma once

#include <cstdint>

namespace tullock {

/// Counter-based splittable generator: every draw is a pure hash of
/// (seed, trial, stream), so parallel trials reproduce identically no matter
/// how they are scheduled. Streams 0..n-1 are the players' type draws and
/// stream n is the winner lottery.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  double uniform(std::uint64_t trial, std::uint64_t stream) const {
    std::uint64_t h = mix(seed_ ^ 0x243F6A8885A308D3ull);
    h = mix(h ^ trial);
    h = mix(h ^ (stream * 0x9E3779B97F4A7C15ull + 1));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
  }

  std::uint64_t seed() const { return seed_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
};

}  // namespace tullock
