// Acceptance run: one line per criterion, nonzero exit when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "actq/error.hpp"
#include "actq/hadamard.hpp"
#include "actq/ingest.hpp"
#include "actq/metrics.hpp"
#include "actq/outliers.hpp"
#include "actq/quant.hpp"
#include "actq/suites.hpp"
#include "actq/transform.hpp"
#include "test_util.hpp"

using namespace actq;

namespace {

// Tolerances and budgets.
constexpr double kQuantBudgetSec = 5.0;
constexpr double kEquivTol = 1e-10;
constexpr double kEquivBudgetSec = 5.0;
constexpr double kCentroidBudgetSec = 10.0;
constexpr double kClusterSigmas = 4.0;
constexpr double kRotMaxRelTol = 1e-9;
constexpr double kRotMaxBandSigmas = 3.0;
constexpr double kSmoothRotRelTol = 0.10;
constexpr double kDifficultyReduction = 10.0;
constexpr double kSmoothMaxRelTol = 1e-9;
constexpr double kMinCorrelation = 0.9;
constexpr double kHadamardTol = 1e-10;
constexpr int kFuzzStreams = 10000;
constexpr int kBits = 4;
constexpr std::uint64_t kSeed = 0;

struct Outcome {
  bool passed = true;
  std::string detail;
};

void fail(Outcome& o, const std::string& why) {
  if (o.passed) o.detail.clear();
  o.passed = false;
  o.detail += (o.detail.empty() ? "" : "; ") + why;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::int64_t brute_nearest(double v, std::int64_t qmax) {
  std::int64_t best = 0;
  double best_d = std::abs(v);
  for (std::int64_t k = -qmax; k <= qmax; ++k) {
    const double d = std::abs(v - static_cast<double>(k));
    if (d < best_d || (d == best_d && k % 2 == 0)) {
      best = k;
      best_d = d;
    }
  }
  return best;
}

Outcome ac1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(101);
  const int bits[] = {2, 3, 4, 8};
  std::size_t mismatches = 0, over = 0;
  for (int t = 0; t < 1000; ++t) {
    const QuantConfig cfg{bits[t % 4], t % 2 ? Granularity::PerChannel : Granularity::PerToken, Rounding::HalfToEven};
    const std::size_t rows = 1 + static_cast<std::size_t>(rng.uniform() * 8);
    const std::size_t cols = 1 + static_cast<std::size_t>(rng.uniform() * 8);
    // Mix in exact ties: half-integers scaled onto a known step.
    std::vector<double> d(rows * cols);
    for (double& v : d) v = rng.uniform() < 0.2 ? 0.5 * std::round(rng.uniform() * 14 - 7) : 4 * rng.normal();
    const Matrix x(rows, cols, std::move(d));
    const auto q = quantize_rtn(x, cfg);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) {
        const double step = q.steps[cfg.granularity == Granularity::PerToken ? r : c];
        if (step == 0.0) continue;
        if (q.integer_grid(r, c) != brute_nearest(x(r, c) / step, cfg.grid_max())) ++mismatches;
        if (std::abs(x(r, c) - q.dequantized(r, c)) > step / 2 * (1 + 1e-12)) ++over;
      }
  }
  const double secs = seconds_since(t0);
  if (mismatches) fail(o, std::to_string(mismatches) + " grid indices differ from brute force");
  if (over) fail(o, std::to_string(over) + " entries exceed half a step");
  if (secs >= kQuantBudgetSec) fail(o, "took " + num(secs) + " s");
  if (o.passed) o.detail = "1000 matrices, 0 mismatches, " + num(secs) + " s";
  return o;
}

Outcome ac2() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(202);
  double worst = 0.0;
  for (auto kind : {TransformKind::None, TransformKind::Smooth, TransformKind::Rotate, TransformKind::SmoothRotate})
    for (std::size_t d : {2, 4, 8, 64})
      for (int t = 0; t < 10; ++t) {
        const auto x = test::gaussian(rng, 16, d, 1 + 10 * rng.uniform());
        const auto w = test::gaussian(rng, d, 12, 0.05);
        const auto p = apply_transform(x, w, {kind});
        worst = std::max(worst, verify_equivalence(x, w, p.x, p.w));
      }
  const double secs = seconds_since(t0);
  if (!(worst < kEquivTol)) fail(o, "worst residual " + num(worst));
  if (secs >= kEquivBudgetSec) fail(o, "took " + num(secs) + " s");
  if (o.passed) o.detail = "worst residual " + num(worst) + ", " + num(secs) + " s";
  return o;
}

Outcome ac3() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t d = 4096;
  const OutlierTokenSpec spec{d, {{5, 900.0}, {37, 500.0}, {301, 300.0}}, 0.01, 42};
  const auto rotated = HadamardLibrary::builtin().multiply_rows(Matrix::row_vector(synth_massive_token(spec)));
  const auto centroids = predict_centroids(spec, d);
  std::size_t outside = 0;
  std::vector<std::size_t> counts(centroids.size(), 0);
  for (double v : rotated.data()) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < centroids.size(); ++k)
      if (std::abs(std::abs(v) - centroids[k]) < std::abs(std::abs(v) - centroids[best])) best = k;
    if (std::abs(std::abs(v) - centroids[best]) > kClusterSigmas * spec.noise_sigma) ++outside;
    ++counts[best];
  }
  const double secs = seconds_since(t0);
  if (centroids.size() != 4) fail(o, std::to_string(centroids.size()) + " centroids predicted");
  if (outside) fail(o, std::to_string(outside) + " entries outside 4 sigma");
  for (auto c : counts)
    if (c != d / 4) fail(o, "cluster of " + std::to_string(c));
  if (secs >= kCentroidBudgetSec) fail(o, "took " + num(secs) + " s");
  if (o.passed) o.detail = "4 clusters of 1024, all within 4 sigma, " + num(secs) + " s";
  return o;
}

Outcome ac4() {
  Outcome o;
  const auto& lib = HadamardLibrary::builtin();
  double worst_exact = 0.0, worst_band = 0.0;
  for (std::size_t d : {4, 64, 1024}) {
    const OutlierTokenSpec exact{d, {{0, 8.0}, {1, 4.0}, {d - 1, 3.0}}, 0.0, 0};
    const auto t = lib.multiply_rows(Matrix::row_vector(synth_massive_token(exact)));
    const double p = predict_rot_max(exact, d);
    worst_exact = std::max(worst_exact, std::abs(max_abs(t) - p) / p);

    const double sigma = 0.05;
    const OutlierTokenSpec noisy{d, {{0, 600.0}, {d / 2, 200.0}}, sigma, 9};
    const auto tn = lib.multiply_rows(Matrix::row_vector(synth_massive_token(noisy)));
    const double dist = std::abs(max_abs(tn) - predict_rot_max(noisy, d));
    worst_band = std::max(worst_band, dist / sigma);
    if (dist > kRotMaxBandSigmas * sigma) fail(o, "d=" + std::to_string(d) + " max off by " + num(dist / sigma) + " sigma");
  }
  if (worst_exact > kRotMaxRelTol) fail(o, "sigma=0 relative error " + num(worst_exact));

  const std::size_t d = 1024;
  const double sigma = 1e-3;
  const OutlierTokenSpec spec{d, {{3, 1000.0}, {400, 600.0}}, sigma, 5};
  Rng rng(13);
  const auto x = Matrix::row_vector(synth_massive_token(spec));
  const auto w = test::gaussian(rng, d, 64, 0.05);
  const auto wmax = row_max_abs(w);
  double other_max = 0.0;
  for (std::size_t j = 0; j < d; ++j)
    if (!spec.outliers.count(j)) other_max = std::max(other_max, std::abs(x(0, j)));
  if (!(600.0 > 100 * sigma && 600.0 > 10 * other_max)) fail(o, "outliers do not dominate");
  const double predicted = predict_smooth_rot_max(spec, {{3, wmax[3]}, {400, wmax[400]}}, d);
  const double got = max_abs(smooth_rotate(x, w, {TransformKind::SmoothRotate, 0.5}).x);
  const double rel = std::abs(got - predicted) / predicted;
  if (rel > kSmoothRotRelTol) fail(o, "smooth-rotate max off by " + num(100 * rel) + "%");
  if (o.passed)
    o.detail = "sigma=0 rel err " + num(worst_exact) + ", noisy max within " + num(worst_band) +
               " sigma, smooth-rotate max off by " + num(100 * rel) + "%";
  return o;
}

std::vector<LayerPair> suite_pairs(const char* name) {
  // Through the file format, as the CLI would see them.
  return pair_records(decode_actd(encode_actd(synth_suite(name, kSeed))));
}

Outcome ac5() {
  Outcome o;
  double worst_ratio = 1e300, worst_smooth = 0.0;
  for (const auto& p : suite_pairs("systematic")) {
    const double before = quantization_difficulty(p.activation);
    const double after = quantization_difficulty(apply_hadamard_rotation(p.activation, p.weight).x);
    worst_ratio = std::min(worst_ratio, before / after);
    const auto s = apply_smoothing(p.activation, p.weight, smoothing_scale(p.activation, p.weight, 0.5));
    const auto xm = column_max_abs(s.x);
    const auto wm = row_max_abs(s.w);
    for (std::size_t j = 0; j < xm.size(); ++j) worst_smooth = std::max(worst_smooth, std::abs(xm[j] - wm[j]) / xm[j]);
  }
  if (worst_ratio < kDifficultyReduction) fail(o, "rotation reduced difficulty only " + num(worst_ratio) + "x");
  if (worst_smooth > kSmoothMaxRelTol) fail(o, "smoothed maxima differ by " + num(worst_smooth));
  if (o.passed) o.detail = "min reduction " + num(worst_ratio) + "x, maxima match to " + num(worst_smooth);
  return o;
}

std::vector<DifficultyReport> massive_report() {
  const std::vector<TransformSpec> specs{{TransformKind::None}, {TransformKind::Smooth}, {TransformKind::Rotate},
                                         {TransformKind::SmoothRotate, 0.5}};
  ReportOptions opts;
  opts.act = QuantConfig::activations(kBits);
  opts.wt = QuantConfig::weights(kBits);
  return build_report(suite_pairs("massive-basic"), specs, opts);
}

Outcome ac6(const std::vector<DifficultyReport>& rows) {
  Outcome o;
  const auto specs = massive_basic_specs(kSeed);
  const auto& s = specs.front();
  if (!(s.token.outliers.size() == 1 && s.token.outliers.begin()->second == 1000.0 && s.token.dim == 4096 &&
        s.token.noise_sigma == 0.1))
    fail(o, "suite record does not have |O|=1, o=1000, d=4096, sigma=0.1");
  double none = NAN, rot = NAN;
  for (const auto& r : rows) {
    if (r.record_name != s.name) continue;
    if (r.transform == TransformKind::None) none = r.layer_error;
    if (r.transform == TransformKind::Rotate) rot = r.layer_error;
  }
  if (!(rot > none)) fail(o, "rotate " + num(rot) + " vs none " + num(none));
  if (o.passed) o.detail = s.name + ": rotate " + num(rot) + " > none " + num(none);
  return o;
}

Outcome ac7(const std::vector<DifficultyReport>& rows) {
  Outcome o;
  std::size_t records = 0;
  for (std::size_t i = 0; i + 3 < rows.size(); i += 4) {
    const double hybrid = rows[i + 3].layer_error;
    const double others = std::min({rows[i].layer_error, rows[i + 1].layer_error, rows[i + 2].layer_error});
    if (!(hybrid < others)) fail(o, rows[i].record_name + ": smooth-rotate " + num(hybrid) + " vs " + num(others));
    ++records;
  }
  if (records != 4) fail(o, std::to_string(records) + " records");
  if (o.passed) o.detail = "smooth-rotate lowest on all " + std::to_string(records) + " records";
  return o;
}

Outcome ac8() {
  Outcome o;
  const auto pairs = suite_pairs("graded");
  const auto rows = build_report(pairs, std::vector<TransformSpec>{{TransformKind::None}});
  std::vector<double> err, diff2;
  for (const auto& r : rows) {
    err.push_back(r.layer_error);
    diff2.push_back(r.act_difficulty * r.act_difficulty);
  }
  const double rho = pearson(err, diff2);
  if (rows.size() < 8) fail(o, "only " + std::to_string(rows.size()) + " layers");
  if (!(rho > kMinCorrelation)) fail(o, "pearson " + num(rho));
  if (o.passed) o.detail = "pearson " + num(rho) + " over " + std::to_string(rows.size()) + " layers";
  return o;
}

Outcome ac9() {
  Outcome o;
  const auto& lib = HadamardLibrary::builtin();
  double worst = 0.0;
  for (std::size_t d : {2, 4, 8, 64, 128, 344}) {
    const auto r = lib.matrix(d);
    worst = std::max(worst, orthogonality_residual(*r));
    const double mag = 1 / std::sqrt(static_cast<double>(d));
    for (double v : r->data())
      if (std::abs(v) != mag) {
        fail(o, "d=" + std::to_string(d) + " entry " + num(v));
        break;
      }
    const auto plan = lib.plan(d);
    int unbalanced = 0;
    for (std::size_t c = 0; c < d; ++c) {
      long s = 0;
      for (std::size_t i = 0; i < d; ++i) s += lib.sign(plan, i, c);
      unbalanced += s != 0;
    }
    if (unbalanced > 1) fail(o, "d=" + std::to_string(d) + " has " + std::to_string(unbalanced) + " unbalanced columns");
  }
  if (!(worst < kHadamardTol)) fail(o, "orthogonality residual " + num(worst));
  try {
    lib.plan(6);
    fail(o, "size 6 produced a plan");
  } catch (const UnsupportedSize& e) {
    if (std::string(e.what()).find("no known Hadamard decomposition for size 6") == std::string::npos)
      fail(o, std::string("unexpected message: ") + e.what());
  }
  if (o.passed) o.detail = "worst residual " + num(worst) + ", size 6 rejected";
  return o;
}

Outcome ac10() {
  Outcome o;
  std::vector<std::vector<std::uint8_t>> seeds;
  for (const auto& name : suite_names()) {
    const auto bytes = encode_actd(synth_suite(name, kSeed));
    if (encode_actd(decode_actd(bytes)) != bytes) fail(o, name + " re-serialization differs");
    seeds.push_back(bytes);
  }
  const std::vector<LayerRecord> tiny{
      {"a", TensorKind::Activation, Matrix::from_rows({{1, -2}, {3.5, 4}}), StoredDtype::F64},
      {"a", TensorKind::Weight, Matrix::from_rows({{0.5}, {0.25}}), StoredDtype::F32}};
  seeds.push_back(encode_actd(tiny));
  if (encode_actd(decode_actd(seeds.back())) != seeds.back()) fail(o, "tiny file re-serialization differs");

  Rng rng(1010);
  int rejected = 0, accepted = 0;
  for (int t = 0; t < kFuzzStreams; ++t) {
    std::vector<std::uint8_t> b;
    const double mode = rng.uniform();
    if (mode < 0.2) {
      b.resize(static_cast<std::size_t>(rng.uniform() * 64));
      for (auto& c : b) c = static_cast<std::uint8_t>(rng.uniform() * 256);
      if (b.size() >= 4 && rng.uniform() < 0.5) std::copy_n("ACTD", 4, b.begin());
    } else {
      // Small seed files only, so the header and record fields get hit often.
      const auto& src = seeds.back();
      b = src;
      const int edits = 1 + static_cast<int>(rng.uniform() * 6);
      for (int e = 0; e < edits; ++e) b[static_cast<std::size_t>(rng.uniform() * b.size())] = static_cast<std::uint8_t>(rng.uniform() * 256);
      if (mode < 0.6) b.resize(static_cast<std::size_t>(rng.uniform() * (b.size() + 1)));
      if (mode > 0.9) b.insert(b.end(), static_cast<std::size_t>(rng.uniform() * 16), 0xff);
    }
    try {
      decode_actd(b);
      ++accepted;
    } catch (const FormatError&) {
      ++rejected;
    } catch (const std::exception& e) {
      fail(o, std::string("non-format exception: ") + e.what());
      break;
    }
  }
  if (o.passed)
    o.detail = "round trips byte-identical; " + std::to_string(kFuzzStreams) + " fuzz streams (" + std::to_string(rejected) +
               " rejected, " + std::to_string(accepted) + " accepted), no crash";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* title;
    std::function<Outcome()> run;
  };
  std::vector<DifficultyReport> massive;
  const std::vector<Criterion> criteria{
      {"AC-1", "quantizer matches brute force", ac1},
      {"AC-2", "transforms preserve XW", ac2},
      {"AC-3", "rotated massive token clusters on predicted centroids", ac3},
      {"AC-4", "rotated maximum predictions", ac4},
      {"AC-5", "difficulty under rotation and smoothing", ac5},
      {"AC-6", "rotation raises error on a massive-outlier layer", [&] {
         massive = massive_report();
         return ac6(massive);
       }},
      {"AC-7", "smooth-rotate lowest error on massive-outlier layers", [&] { return ac7(massive); }},
      {"AC-8", "layer error tracks squared activation difficulty", ac8},
      {"AC-9", "Hadamard construction", ac9},
      {"AC-10", "ACTD canonical form and fuzzing", ac10},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%-5s %s  %s: %s\n", c.id, o.passed ? "PASS" : "FAIL", c.title, o.detail.c_str());
    failures += !o.passed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures ? EXIT_FAILURE : EXIT_SUCCESS;
}
