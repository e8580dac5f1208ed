#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "actq/tensor.hpp"

namespace actq {

// Group over which one step size is shared. PerChannel means one step per
// COLUMN; for a weight in the X*W orientation that is one step per output
// channel.
enum class Granularity { PerToken, PerChannel };

// Tie rule for values exactly halfway between two grid points.
enum class Rounding { HalfToEven, HalfAwayFromZero };

struct QuantConfig {
  int bits = 4;
  Granularity granularity = Granularity::PerToken;
  Rounding rounding = Rounding::HalfToEven;

  /// Largest grid index, 2^(bits-1) - 1. Throws InvalidArgument when bits is
  /// outside [2, 32].
  std::int64_t grid_max() const;

  static QuantConfig activations(int bits = 4) { return {bits, Granularity::PerToken, Rounding::HalfToEven}; }
  static QuantConfig weights(int bits = 4) { return {bits, Granularity::PerChannel, Rounding::HalfToEven}; }
};

struct IntMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int64_t> data;

  std::int64_t operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;
};

struct QuantResult {
  IntMatrix integer_grid;
  std::vector<double> steps;  // one per group
  Matrix dequantized;
};

/// Rounds to the nearest integer under the given tie rule.
double round_with(double v, Rounding mode);

/// Step size per group: group max |x| / grid_max, 0 for an all-zero group.
std::vector<double> compute_steps(const Matrix& x, const QuantConfig& cfg);

/// Symmetric round-to-nearest quantization without clipping.
QuantResult quantize_rtn(const Matrix& x, const QuantConfig& cfg);

/// Fake quantization: quantize_rtn(x, cfg).dequantized.
Matrix fake_quantize(const Matrix& x, const QuantConfig& cfg);

/// ||XW - Q(X)Q(W)||_F^2.
double layer_error(const Matrix& x, const Matrix& w, const QuantConfig& cfg_act,
                   const QuantConfig& cfg_wt);

/// Variance of uniform rounding noise with the given step, step^2 / 12.
double quant_noise_variance(double step);

/// Number of distinct grid indices occupied by round(token / step); 1 when
/// step is 0.
std::size_t effective_bins(std::span<const double> token, double step,
                           Rounding rounding = Rounding::HalfToEven);

}  // namespace actq
