#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace nmpa {

// Counter-based stream RNG (splitmix64 output function). A root seed fans
// out to independent named streams so that each component (topology, fading,
// battery, exploration, ...) can be replayed on its own.
class RngStream {
 public:
  RngStream() = default;
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; the second deviate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 6.283185307179586476925286766559 * u2;
    spare_ = mag * std::sin(ang);
    has_spare_ = true;
    return mag * std::cos(ang);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Magnitude of a complex normal with per-component variance 1/2,
  // i.e. Rayleigh with scale 1/sqrt(2), sampled by inverse CDF.
  double rayleigh_unit() {
    const double u = uniform();  // 1 - u in (0, 1]
    return std::sqrt(-std::log1p(-u));
  }

  // Integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

namespace detail {
inline constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Deterministic child stream: root seed + stream name + index.
inline RngStream derive_stream(std::uint64_t root, std::string_view name,
                               std::uint64_t index = 0) {
  std::uint64_t s = detail::mix64(root ^ detail::fnv1a64(name));
  s = detail::mix64(s ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
  return RngStream(s);
}

}  // namespace nmpa
