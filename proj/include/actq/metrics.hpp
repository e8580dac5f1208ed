#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "actq/quant.hpp"
#include "actq/tensor.hpp"
#include "actq/transform.hpp"

namespace actq {

/// Population standard deviation of the channel magnitudes.
double quantization_difficulty(const Matrix& m);

/// Excess kurtosis (normal == 0) of the flattened entries. Throws
/// UndefinedStatistic for zero variance.
double kurtosis(const Matrix& m);

/// Pearson correlation. Throws ShapeError on length mismatch or fewer than
/// two samples, UndefinedStatistic when either input is constant.
double pearson(std::span<const double> x, std::span<const double> y);

/// A named activation/weight pair in X*W orientation.
struct LayerPair {
  std::string name;
  Matrix activation;
  Matrix weight;
};

struct DifficultyReport {
  std::string record_name;
  TransformKind transform = TransformKind::None;
  double alpha = kDefaultAlpha;
  int bits_act = 4;
  int bits_wt = 4;
  double layer_error = 0.0;
  double act_difficulty = 0.0;
  double wt_difficulty = 0.0;
  double act_kurtosis = 0.0;
  double wt_kurtosis = 0.0;
  double act_max_abs = 0.0;
  std::size_t effective_bins_min = 0;  // over tokens, with per-token steps
};

/// Optional per-record migration strength. Patterns are matched in order and
/// the last match wins; see name_matches for the pattern language.
struct AlphaOverride {
  std::string pattern;
  double alpha;
};

/// A pattern containing '*' or '?' is a glob over the whole name; anything
/// else matches as a prefix.
bool name_matches(std::string_view pattern, std::string_view name);

/// Effective alpha for `name`: last matching override, else `fallback`.
double resolve_alpha(std::string_view name, double fallback, std::span<const AlphaOverride> overrides);

struct ReportOptions {
  QuantConfig act = QuantConfig::activations();
  QuantConfig wt = QuantConfig::weights();
  std::vector<AlphaOverride> alpha_overrides;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Single row: transforms the pair, quantizes and measures it.
DifficultyReport measure(const LayerPair& pair, const TransformSpec& spec, const QuantConfig& act,
                         const QuantConfig& wt,
                         const HadamardLibrary& lib = HadamardLibrary::builtin());

/// One row per (record, spec), in record-major order. Rows are computed in
/// parallel; the result is identical to sequential evaluation.
std::vector<DifficultyReport> build_report(std::span<const LayerPair> records,
                                           std::span<const TransformSpec> specs,
                                           const ReportOptions& options = {},
                                           const HadamardLibrary& lib = HadamardLibrary::builtin());

}  // namespace actq
