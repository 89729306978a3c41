#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "animgram/vec3.hpp"

namespace animgram {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Purposes that get their own stream per scenario.
enum class StreamDomain : std::uint64_t { kScene = 0, kCaptions = 1 };

/// Seed for stream `stream` of `domain` under `master`. Counter-based, so the
/// result for scenario i never depends on how many other scenarios ran.
constexpr std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t stream,
                                           StreamDomain domain = StreamDomain::kScene) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(domain) * 0xD1B54A32D192ED03ULL));
  return h;
}

/// Random stream with platform-independent derived distributions.
///
/// std::mt19937_64 output is fully specified by the standard, but the
/// <random> distributions are not, so every draw below is computed by hand
/// from raw 64-bit words.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng for_stream(std::uint64_t master, std::uint64_t stream,
                        StreamDomain domain = StreamDomain::kScene) {
    return Rng(derive_stream_seed(master, stream, domain));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in the open interval (0, 1).
  double uniform_open() {
    for (;;) {
      double u = uniform();
      if (u > 0.0) return u;
    }
  }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n); n > 0. Rejection keeps it unbiased.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    for (;;) {
      std::uint64_t r = engine_();
      if (r < limit) return r % n;
    }
  }

  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  bool coin(double p_true = 0.5) { return uniform() < p_true; }

  /// +1 or -1 with equal probability.
  double sign() { return coin() ? 1.0 : -1.0; }

  /// Uniform point on the unit sphere.
  Vec3 unit_vector() {
    const double cos_t = uniform(-1.0, 1.0);
    const double phi = uniform(0.0, 2.0 * kPi);
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    return {sin_t * std::cos(phi), cos_t, sin_t * std::sin(phi)};
  }

  /// Uniform direction within `half_angle` radians of unit vector `axis`.
  Vec3 in_cone(const Vec3& axis, double half_angle) {
    const double cos_min = std::cos(half_angle);
    const double cos_t = cos_min + (1.0 - cos_min) * uniform();
    const double phi = uniform(0.0, 2.0 * kPi);
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    // Orthonormal frame around the axis.
    const Vec3 helper = std::abs(axis.x) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 0.0, 1.0};
    const Vec3 u = normalized(cross(axis, helper));
    const Vec3 v = cross(axis, u);
    return axis * cos_t + u * (sin_t * std::cos(phi)) + v * (sin_t * std::sin(phi));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace animgram
