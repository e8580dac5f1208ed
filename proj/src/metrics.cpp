#include "actq/metrics.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <thread>

#include "actq/error.hpp"

namespace actq {

double quantization_difficulty(const Matrix& m) {
  const auto mags = channel_magnitudes(m);
  double mean = 0.0;
  for (double v : mags) mean += v;
  mean /= static_cast<double>(mags.size());
  double var = 0.0;
  for (double v : mags) var += (v - mean) * (v - mean);
  return std::sqrt(var / static_cast<double>(mags.size()));
}

double kurtosis(const Matrix& m) {
  const auto data = m.data();
  const double n = static_cast<double>(data.size());
  double mean = 0.0;
  for (double v : data) mean += v;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : data) {
    const double d2 = (v - mean) * (v - mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= n;
  m4 /= n;
  if (!(m2 > 0.0)) throw UndefinedStatistic("kurtosis: zero variance");
  return m4 / (m2 * m2) - 3.0;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("pearson: inputs differ in length");
  if (x.size() < 2) throw ShapeError("pearson: need at least two samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw UndefinedStatistic("pearson: constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

bool name_matches(std::string_view pattern, std::string_view name) {
  if (pattern.find_first_of("*?[") == std::string_view::npos) {
    return name.substr(0, pattern.size()) == pattern;
  }
  return ::fnmatch(std::string(pattern).c_str(), std::string(name).c_str(), 0) == 0;
}

double resolve_alpha(std::string_view name, double fallback, std::span<const AlphaOverride> overrides) {
  double alpha = fallback;
  for (const auto& o : overrides) {
    if (name_matches(o.pattern, name)) alpha = o.alpha;
  }
  return alpha;
}

namespace {

double kurtosis_or_nan(const Matrix& m) {
  try {
    return kurtosis(m);
  } catch (const UndefinedStatistic&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

DifficultyReport measure(const LayerPair& pair, const TransformSpec& spec, const QuantConfig& act,
                         const QuantConfig& wt, const HadamardLibrary& lib) {
  const auto t = apply_transform(pair.activation, pair.weight, spec, lib);

  DifficultyReport row;
  row.record_name = pair.name;
  row.transform = spec.kind;
  row.alpha = spec.alpha;
  row.bits_act = act.bits;
  row.bits_wt = wt.bits;
  row.layer_error = layer_error(t.x, t.w, act, wt);
  row.act_difficulty = quantization_difficulty(t.x);
  row.wt_difficulty = quantization_difficulty(t.w);
  row.act_kurtosis = kurtosis_or_nan(t.x);
  row.wt_kurtosis = kurtosis_or_nan(t.w);
  row.act_max_abs = max_abs(t.x);

  const QuantConfig per_token{act.bits, Granularity::PerToken, act.rounding};
  const auto steps = compute_steps(t.x, per_token);
  std::size_t bins = std::numeric_limits<std::size_t>::max();
  for (std::size_t r = 0; r < t.x.rows(); ++r) {
    bins = std::min(bins, effective_bins(t.x.row(r), steps[r], act.rounding));
  }
  row.effective_bins_min = bins;
  return row;
}

std::vector<DifficultyReport> build_report(std::span<const LayerPair> records,
                                           std::span<const TransformSpec> specs,
                                           const ReportOptions& options,
                                           const HadamardLibrary& lib) {
  if (records.empty()) throw InvalidArgument("build_report: no records");
  options.act.grid_max();
  options.wt.grid_max();
  for (const auto& r : records) {
    if (r.activation.cols() != r.weight.rows()) {
      throw ShapeError("record '" + r.name + "': activation has " +
                       std::to_string(r.activation.cols()) + " channels but weight has " +
                       std::to_string(r.weight.rows()) + " rows");
    }
  }

  const std::size_t total = records.size() * specs.size();
  std::vector<std::optional<DifficultyReport>> rows(total);
  std::vector<std::exception_ptr> errors(total);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      const auto& record = records[i / specs.size()];
      TransformSpec spec = specs[i % specs.size()];
      spec.alpha = resolve_alpha(record.name, spec.alpha, options.alpha_overrides);
      try {
        rows[i] = measure(record, spec, options.act, options.wt, lib);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::max<std::size_t>(total, 1)));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  std::vector<DifficultyReport> out;
  out.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*rows[i]));
  }
  return out;
}

}  // namespace actq
