#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace polyakgrad {

// splitmix64 finalizer; used to derive independent substream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(a) ^ b);
}

// Deterministic RNG with platform-independent uniform/normal draws.
// Substreams are derived by hashing (master seed, stream indices), so the
// k-th trajectory of the i-th iteration sees the same randomness no matter
// how work is scheduled.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(mix64(seed)) {}

  static Rng stream(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                    std::uint64_t c = 0) {
    return Rng(mix64(mix64(mix64(master, a), b), c));
  }

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (no cached spare, for reproducibility).
  double normal() {
    double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Uniform integer on [0, n).
  int uniform_int(int n) {
    auto un = static_cast<std::uint64_t>(n);
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t v = next_u64();
    while (v >= limit) {
      v = next_u64();
    }
    return static_cast<int>(v % un);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace polyakgrad
