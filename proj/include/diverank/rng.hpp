#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace diverank {

// Derives a child seed from a master seed and a stream id (splitmix64 step),
// so per-user randomness does not depend on processing order.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// mt19937_64 raw output is pinned by the standard; the standard library
// distributions are not. All uniform/gaussian draws and shuffles are built
// from raw engine words so that a seed reproduces the same stream under any
// standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Unbiased uniform integer in [0, bound), bound > 0.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t rem = (UINT64_MAX % bound + 1) % bound;
    const std::uint64_t threshold = 0ULL - rem;  // rem == 0 accepts everything
    for (;;) {
      const std::uint64_t x = engine_();
      if (rem == 0 || x < threshold) return x % bound;
    }
  }

  // Standard normal via Box-Muller on raw uniforms.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - next_double();  // (0, 1], keeps log() finite
    const double u2 = next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  // Fisher-Yates; std::shuffle is not reproducible across standard libraries.
  template <class T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(next_below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace diverank
