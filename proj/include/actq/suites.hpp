#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "actq/ingest.hpp"
#include "actq/outliers.hpp"

namespace actq {

/// A layer whose activation holds one massive-outlier token among benign
/// Gaussian tokens, paired with a Gaussian weight whose outlier-channel rows
/// are damped.
struct MassiveLayerSpec {
  std::string name;
  std::size_t tokens = 32;
  std::size_t massive_row = 0;
  OutlierTokenSpec token;       // dim, outliers and per-dimension noise sigma
  std::size_t out_channels = 32;
  double weight_sigma = 0.02;
  double outlier_row_scale = 1.0;  // multiplier on the weight rows of outlier channels
  std::uint64_t seed = 0;          // benign tokens and weights
};

/// Gaussian weight with the rows of the token's outlier channels scaled by
/// outlier_row_scale.
Matrix synth_massive_weight(const MassiveLayerSpec& spec);

struct SystematicLayerSpec {
  std::string name;
  SystematicSpec activation;
  std::size_t out_channels = 128;
  double weight_sigma = 0.02;
  std::uint64_t seed = 0;
};

Matrix synth_massive_activation(const MassiveLayerSpec& spec);
Matrix synth_benign_weight(std::size_t rows, std::size_t cols, double sigma, std::uint64_t seed);

/// The four massive-outlier layers of suite "massive-basic". The first one
/// is the single-outlier case (o = 1000, d = 4096, sigma = 0.1).
std::vector<MassiveLayerSpec> massive_basic_specs(std::uint64_t seed);

/// Suite "systematic": one outlier channel of scale 100 per layer.
std::vector<SystematicLayerSpec> systematic_specs(std::uint64_t seed);

/// Suite "graded": eight layers with increasing systematic-outlier scale.
std::vector<SystematicLayerSpec> graded_specs(std::uint64_t seed);

std::vector<std::string> suite_names();

/// Activation and weight records of a named suite, stored as binary32 (the
/// values are already rounded to binary32, so the file and the in-memory
/// records agree exactly). Throws InvalidArgument listing the known suites.
std::vector<LayerRecord> synth_suite(std::string_view name, std::uint64_t seed);

}  // namespace actq
