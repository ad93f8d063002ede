#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gsphqc {

/// Deterministic random stream.
///
/// The engine is std::mt19937_64, whose output sequence is pinned bit-exactly
/// by the C++ standard for a given seed. Variate transforms are implemented
/// explicitly here instead of through std:: distributions, whose output is
/// implementation-defined. Identical (seed, call sequence) therefore yields
/// identical samples on every conforming platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; never zero, safe under log().
  double uniform_open() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform strictly inside (0, 1); both endpoints excluded.
  double uniform_strict() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via the Box-Muller transform. Pairs are generated
  /// together; the second value is cached and returned by the next call.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
    const double angle = kTwoPi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Raw 64-bit engine word (used by shuffles).
  std::uint64_t next_word() { return engine_(); }

 private:
  static constexpr double kTwoPi = 6.28318530717958647692528676655900577;

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gsphqc
