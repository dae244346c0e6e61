#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace tlink {

/// Deterministic random stream. Streams are derived from a master seed, a
/// purpose tag, and an index, so adding consumers (e.g. more receivers) never
/// perturbs the draws of existing ones. Gaussian variates use an explicit
/// Box-Muller transform on top of mt19937_64 so results do not depend on the
/// standard library's unspecified normal_distribution algorithm.
class RngStream {
 public:
  explicit RngStream(std::uint64_t stream_seed) : gen_(stream_seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be a power of two (constellation
  /// orders are); enforizing that keeps the draw bias-free with one word.
  std::uint64_t uniform_pow2(std::uint64_t n) { return gen_() & (n - 1); }

  /// Real standard normal.
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(t);
    have_cached_ = true;
    return r * std::cos(t);
  }

  /// Circularly-symmetric complex normal with unit variance (0.5 per part).
  std::complex<double> cgaussian() {
    const double s = std::numbers::sqrt2 / 2.0;
    return {s * gaussian(), s * gaussian()};
  }

 private:
  std::mt19937_64 gen_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}
}  // namespace detail

/// Stream seed for (master seed, purpose tag, index).
inline std::uint64_t derive_stream(std::uint64_t seed, std::string_view purpose,
                                   std::uint64_t index = 0) {
  std::uint64_t h = detail::splitmix64(seed);
  h = detail::splitmix64(h ^ detail::fnv1a(purpose));
  h = detail::splitmix64(h ^ index);
  return h;
}

inline RngStream make_stream(std::uint64_t seed, std::string_view purpose,
                             std::uint64_t index = 0) {
  return RngStream(derive_stream(seed, purpose, index));
}

}  // namespace tlink
