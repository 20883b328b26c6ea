#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ddgame/errors.hpp"

namespace ddgame {

// All randomness flows through this wrapper so that results are reproducible
// across platforms. std::mt19937_64 is bit-exact by the standard; the
// distribution transforms below are hand-rolled because the std:: ones are
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; the second draw of each pair is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 =
        (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Uniform index in [0, n). Bias is < 2^-52 for n below 2^52.
  std::size_t index(std::size_t n) {
    if (n == 0) throw DimensionMismatch("Rng::index: n must be positive");
    auto i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}
}  // namespace detail

// Deterministic seed split: stream k of a master seed. Used to derive
// per-phase and per-trial seeds; documented in the README.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
  return detail::splitmix64(master ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
}

}  // namespace ddgame
