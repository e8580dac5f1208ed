#pragma once

#include <cstdint>
#include <random>

namespace actq {

/// Portable seeded generator: std::mt19937_64 (fully specified by the
/// standard) with uniforms built from the top 53 bits and normals from the
/// Box-Muller transform. Output is identical on every conforming platform,
/// unlike the unspecified std::*_distribution algorithms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal. Draws come in pairs (cos, sin branch).
  double normal();

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace actq
