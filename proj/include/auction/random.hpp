#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace auction {

/// SplitMix64 output function.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of child stream `stream` of `parent`. Distinct (parent, stream) pairs
/// give unrelated seeds; this is the only way seeds are derived in the project.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) noexcept {
  return splitmix64(parent ^ splitmix64(stream));
}

/// Seed of trial `trial` in sweep cell `cell` under a master seed.
constexpr std::uint64_t trial_seed(std::uint64_t master, std::uint64_t cell,
                                   std::uint64_t trial) noexcept {
  return derive_seed(derive_seed(master, cell), trial);
}

/// Random stream used by every simulator.
///
/// Uniforms are the top 53 bits of a mt19937_64 draw scaled to [0, 1).
/// Normals use the Marsaglia polar method on pairs of uniforms mapped to
/// (-1, 1); the second variate of each accepted pair is cached and returned
/// by the next call.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// True with probability p. p >= 1 is always true, p <= 0 never.
  bool bernoulli(double p) { return uniform() < p; }

  /// Fair ±1.
  int coin() { return (engine_() >> 63) != 0 ? 1 : -1; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace auction
