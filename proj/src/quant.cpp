#include "actq/quant.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "actq/error.hpp"

namespace actq {

std::int64_t QuantConfig::grid_max() const {
  if (bits < 2 || bits > 32) {
    throw InvalidArgument("bit width must be in [2, 32], got " + std::to_string(bits));
  }
  return (std::int64_t{1} << (bits - 1)) - 1;
}

double round_with(double v, Rounding mode) {
  const double lower = std::floor(v);
  const double frac = v - lower;
  if (frac != 0.5) return frac < 0.5 ? lower : lower + 1.0;
  if (mode == Rounding::HalfAwayFromZero) return v < 0.0 ? lower : lower + 1.0;
  return std::fmod(lower, 2.0) == 0.0 ? lower : lower + 1.0;
}

std::vector<double> compute_steps(const Matrix& x, const QuantConfig& cfg) {
  const double levels = static_cast<double>(cfg.grid_max());
  auto maxima = cfg.granularity == Granularity::PerToken ? row_max_abs(x) : column_max_abs(x);
  for (double& m : maxima) m /= levels;
  return maxima;
}

QuantResult quantize_rtn(const Matrix& x, const QuantConfig& cfg) {
  auto steps = compute_steps(x, cfg);
  const bool per_token = cfg.granularity == Granularity::PerToken;

  IntMatrix grid{x.rows(), x.cols(), std::vector<std::int64_t>(x.size(), 0)};
  std::vector<double> deq(x.size(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      const double step = steps[per_token ? r : c];
      if (step == 0.0) continue;
      const double q = round_with(x(r, c) / step, cfg.rounding);
      grid.data[r * x.cols() + c] = static_cast<std::int64_t>(q);
      deq[r * x.cols() + c] = q * step;
    }
  }
  return {std::move(grid), std::move(steps), Matrix(x.rows(), x.cols(), std::move(deq))};
}

Matrix fake_quantize(const Matrix& x, const QuantConfig& cfg) {
  return quantize_rtn(x, cfg).dequantized;
}

double layer_error(const Matrix& x, const Matrix& w, const QuantConfig& cfg_act,
                   const QuantConfig& cfg_wt) {
  if (x.cols() != w.rows()) {
    throw ShapeError("layer_error: activation has " + std::to_string(x.cols()) +
                     " channels but weight has " + std::to_string(w.rows()) + " rows");
  }
  const Matrix exact = matmul(x, w);
  const Matrix approx = matmul(fake_quantize(x, cfg_act), fake_quantize(w, cfg_wt));
  return squared_frobenius_norm(subtract(exact, approx));
}

double quant_noise_variance(double step) {
  if (!(step >= 0.0)) throw InvalidArgument("step must be non-negative");
  return step * step / 12.0;
}

std::size_t effective_bins(std::span<const double> token, double step, Rounding rounding) {
  if (!(step >= 0.0)) throw InvalidArgument("step must be non-negative");
  if (step == 0.0 || token.empty()) return 1;
  std::set<double> bins;
  for (double v : token) bins.insert(round_with(v / step, rounding) + 0.0);
  return bins.size();
}

}  // namespace actq
