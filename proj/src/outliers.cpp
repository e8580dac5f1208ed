#include "actq/outliers.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "actq/error.hpp"
#include "actq/rng.hpp"

namespace actq {

void OutlierTokenSpec::validate() const {
  if (dim == 0) throw InvalidArgument("outlier token: dim must be positive");
  if (outliers.empty()) throw InvalidArgument("outlier token: no outlier dimensions");
  if (outliers.size() > dim) throw InvalidArgument("outlier token: more outliers than dimensions");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw InvalidArgument("outlier token: noise sigma must be non-negative");
  }
  for (const auto& [j, o] : outliers) {
    if (j >= dim) {
      throw InvalidArgument("outlier token: dimension " + std::to_string(j) + " out of range");
    }
    if (!std::isfinite(o) || !(std::abs(o) > 10.0 * noise_sigma)) {
      throw InvalidArgument("outlier token: |o_" + std::to_string(j) +
                            "| must exceed 10 sigma");
    }
  }
}

std::vector<double> OutlierTokenSpec::values() const {
  std::vector<double> out;
  for (const auto& [j, o] : outliers) out.push_back(o);
  return out;
}

void SystematicSpec::validate() const {
  if (tokens == 0 || dim == 0) throw InvalidArgument("systematic: tokens and dim must be positive");
  if (outlier_channels.empty()) throw InvalidArgument("systematic: no outlier channels");
  std::set<std::size_t> seen;
  for (auto c : outlier_channels) {
    if (c >= dim) throw InvalidArgument("systematic: channel " + std::to_string(c) + " out of range");
    if (!seen.insert(c).second) throw InvalidArgument("systematic: duplicate channel");
  }
  if (!(channel_scale > 1.0) || !std::isfinite(channel_scale)) {
    throw InvalidArgument("systematic: channel_scale must exceed 1");
  }
  if (!(base_sigma > 0.0) || !std::isfinite(base_sigma)) {
    throw InvalidArgument("systematic: base_sigma must be positive");
  }
}

std::vector<double> synth_massive_token(const OutlierTokenSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::vector<double> t(spec.dim);
  for (std::size_t j = 0; j < spec.dim; ++j) {
    auto it = spec.outliers.find(j);
    t[j] = it != spec.outliers.end() ? it->second : spec.noise_sigma * rng.normal();
  }
  return t;
}

Matrix synth_systematic(const SystematicSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::vector<double> d(spec.tokens * spec.dim);
  for (double& v : d) v = spec.base_sigma * rng.normal();
  for (std::size_t r = 0; r < spec.tokens; ++r) {
    for (auto c : spec.outlier_channels) d[r * spec.dim + c] *= spec.channel_scale;
  }
  return Matrix(spec.tokens, spec.dim, std::move(d));
}

std::vector<double> predict_centroids(std::span<const double> outlier_values, std::size_t d) {
  if (outlier_values.empty()) throw InvalidArgument("predict_centroids: no outliers");
  if (outlier_values.size() > kMaxCentroidOutliers) {
    throw InvalidArgument("predict_centroids: at most " + std::to_string(kMaxCentroidOutliers) +
                          " outliers supported");
  }
  if (d == 0) throw InvalidArgument("predict_centroids: d must be positive");
  const double norm = std::sqrt(static_cast<double>(d));
  const std::size_t k = outlier_values.size();
  // The first sign is fixed to + : |s| is invariant under flipping all signs.
  std::vector<double> sums;
  sums.reserve(std::size_t{1} << (k - 1));
  for (std::size_t mask = 0; mask < (std::size_t{1} << (k - 1)); ++mask) {
    double s = outlier_values[0];
    for (std::size_t i = 1; i < k; ++i) {
      s += (mask >> (i - 1) & 1) ? -outlier_values[i] : outlier_values[i];
    }
    sums.push_back(std::abs(s) / norm);
  }
  std::sort(sums.begin(), sums.end(), std::greater<>());
  const double scale = sums.front();
  std::vector<double> out;
  for (double s : sums) {
    if (out.empty() || std::abs(out.back() - s) > 1e-12 * std::max(scale, 1.0)) out.push_back(s);
  }
  return out;
}

std::vector<double> predict_centroids(const OutlierTokenSpec& spec, std::size_t d) {
  return predict_centroids(spec.values(), d);
}

double predict_rot_max(std::span<const double> outlier_values, std::size_t d) {
  if (d == 0) throw InvalidArgument("predict_rot_max: d must be positive");
  double acc = 0.0;
  for (double o : outlier_values) acc += std::abs(o);
  return acc / std::sqrt(static_cast<double>(d));
}

double predict_rot_max(const OutlierTokenSpec& spec, std::size_t d) {
  spec.validate();
  return predict_rot_max(spec.values(), d);
}

double predict_smooth_rot_max(const OutlierTokenSpec& spec,
                              const std::map<std::size_t, double>& w_channel_max, std::size_t d) {
  spec.validate();
  if (d == 0) throw InvalidArgument("predict_smooth_rot_max: d must be positive");
  double acc = 0.0;
  for (const auto& [j, o] : spec.outliers) {
    auto it = w_channel_max.find(j);
    if (it == w_channel_max.end() || !(it->second > 0.0)) {
      throw InvalidArgument("predict_smooth_rot_max: weight maximum for outlier channel " +
                            std::to_string(j) + " must be positive");
    }
    acc += std::sqrt(std::abs(o) * it->second / static_cast<double>(d));
  }
  return acc;
}

ClusterCheck cluster_check(std::span<const double> rotated, std::span<const double> centroids,
                           double sigma) {
  if (centroids.empty()) throw InvalidArgument("cluster_check: no centroids");
  double scale = 0.0;
  for (double c : centroids) scale = std::max(scale, std::abs(c));
  const double band = sigma > 0.0 ? 4.0 * sigma : 1e-9 * std::max(scale, 1.0);

  ClusterCheck out;
  out.counts.assign(centroids.size(), 0);
  std::size_t inside = 0;
  for (double v : rotated) {
    const double a = std::abs(v);
    std::size_t best = 0;
    for (std::size_t c = 1; c < centroids.size(); ++c) {
      if (std::abs(a - centroids[c]) < std::abs(a - centroids[best])) best = c;
    }
    if (std::abs(a - centroids[best]) <= band) {
      ++inside;
      ++out.counts[best];
    }
  }
  out.fraction = rotated.empty() ? 1.0 : static_cast<double>(inside) / static_cast<double>(rotated.size());
  return out;
}

}  // namespace actq
