#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "actq/tensor.hpp"

namespace actq {

/// A token of dimension `dim` holding massive outliers at a few dimensions
/// and N(0, noise_sigma^2) noise everywhere else.
struct OutlierTokenSpec {
  std::size_t dim = 0;
  std::map<std::size_t, double> outliers;  // dimension -> value
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument unless the outlier set is nonempty, every index
  /// is below dim, sigma >= 0, and min |o_j| > 10 sigma.
  void validate() const;

  std::vector<double> values() const;
};

/// n x d Gaussian activations whose outlier channels are scaled up.
struct SystematicSpec {
  std::size_t tokens = 0;
  std::size_t dim = 0;
  std::vector<std::size_t> outlier_channels;
  double channel_scale = 100.0;
  double base_sigma = 1.0;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument unless channels are nonempty, distinct and in
  /// range, channel_scale > 1 and base_sigma > 0.
  void validate() const;
};

/// Deterministic in the seed. Noise is drawn for non-outlier dimensions in
/// increasing index order.
std::vector<double> synth_massive_token(const OutlierTokenSpec& spec);

Matrix synth_systematic(const SystematicSpec& spec);

inline constexpr std::size_t kMaxCentroidOutliers = 20;

/// Distinct values |sum_i sign_i o_i| / sqrt(d) over all sign patterns,
/// sorted descending. Sums that agree to 1e-12 relative are merged.
std::vector<double> predict_centroids(std::span<const double> outlier_values, std::size_t d);
std::vector<double> predict_centroids(const OutlierTokenSpec& spec, std::size_t d);

/// sum_i |o_i| / sqrt(d): the rotated maximum when some Hadamard column
/// matches the outlier signs (always the case for positive outliers under
/// Sylvester, whose first column is all +1). An upper bound otherwise.
double predict_rot_max(std::span<const double> outlier_values, std::size_t d);
double predict_rot_max(const OutlierTokenSpec& spec, std::size_t d);

/// Half-width of the noise band around the predicted maximum, 3 sigma.
inline double rot_max_noise_band(double sigma) { return 3.0 * sigma; }

/// sum_i sqrt(|o_i| * maxW_i / d): maximum after smoothing at alpha = 0.5
/// then rotation. Throws InvalidArgument when an outlier dimension has no
/// positive weight maximum.
double predict_smooth_rot_max(const OutlierTokenSpec& spec,
                              const std::map<std::size_t, double>& w_channel_max, std::size_t d);

struct ClusterCheck {
  double fraction = 0.0;             // share of entries within the band of a centroid
  std::vector<std::size_t> counts;   // per centroid, aligned with the input order
};

/// Assigns each |entry| to its nearest centroid and counts it when within
/// 4 sigma (or 1e-9 relative to the largest centroid when sigma == 0).
ClusterCheck cluster_check(std::span<const double> rotated, std::span<const double> centroids,
                           double sigma);

}  // namespace actq
