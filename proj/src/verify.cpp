#include "actq/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <regex>
#include <sstream>

#include "actq/error.hpp"
#include "actq/hadamard.hpp"
#include "actq/outliers.hpp"
#include "actq/quant.hpp"
#include "actq/rng.hpp"
#include "actq/transform.hpp"
#include "hadamard_assets.hpp"

namespace actq {

namespace {

struct NamedText {
  std::string name;
  std::string text;
};

std::vector<NamedText> asset_texts(const std::optional<std::filesystem::path>& dir) {
  std::vector<NamedText> out;
  if (!dir) {
    for (const auto& a : detail::embedded_hadamard_assets()) {
      out.push_back({hadamard_asset_name(a.order), std::string(a.text)});
    }
    return out;
  }
  static const std::regex pattern(R"(hadamard_\d+\.txt)");
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(*dir, ec)) {
    const auto name = entry.path().filename().string();
    if (!std::regex_match(name, pattern)) continue;
    std::ifstream in(entry.path());
    std::stringstream buf;
    buf << in.rdbuf();
    out.push_back({name, buf.str()});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return out;
}

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double sigma = 1.0) {
  std::vector<double> d(rows * cols);
  for (double& v : d) v = sigma * rng.normal();
  return Matrix(rows, cols, std::move(d));
}

CheckResult upper(std::string name, double measured, double tol) {
  CheckResult r{std::move(name), measured <= tol, measured, tol, {}};
  if (!r.passed) r.detail = "measured value exceeds tolerance";
  return r;
}

// Nearest grid index by exhaustive search, ties broken by `mode`.
std::int64_t brute_force_index(double normalized, std::int64_t qmax, Rounding mode) {
  std::int64_t best = -qmax;
  double best_dist = std::abs(normalized + static_cast<double>(qmax));
  for (std::int64_t k = -qmax + 1; k <= qmax; ++k) {
    const double dist = std::abs(normalized - static_cast<double>(k));
    if (dist < best_dist) {
      best = k;
      best_dist = dist;
    } else if (dist == best_dist) {
      const bool prefer = mode == Rounding::HalfToEven ? (k % 2 == 0) : (std::abs(k) > std::abs(best));
      if (prefer) best = k;
    }
  }
  return best;
}

void hadamard_checks(const HadamardLibrary& lib, VerifyLevel level, std::vector<CheckResult>& out) {
  for (std::size_t d : {2, 4, 8, 64, 128, 344}) {
    const auto r = lib.matrix(d);
    out.push_back(upper("hadamard " + std::to_string(d) + ": ||R R^T - I||_F", orthogonality_residual(*r), 1e-10));
    const double mag = 1.0 / std::sqrt(static_cast<double>(d));
    double worst = 0.0;
    for (double v : r->data()) worst = std::max(worst, std::abs(std::abs(v) - mag));
    out.push_back(upper("hadamard " + std::to_string(d) + ": entries +-1/sqrt(d)", worst, 0.0));
    const HadamardPlan p = lib.plan(d);
    std::size_t unbalanced = 0;
    for (std::size_t c = 0; c < d; ++c) {
      long sum = 0;
      for (std::size_t row = 0; row < d; ++row) sum += lib.sign(p, row, c);
      if (sum != 0) ++unbalanced;
    }
    out.push_back(upper("hadamard " + std::to_string(d) + ": columns with nonzero sum", static_cast<double>(unbalanced), 1.0));
  }

  {
    CheckResult r{"hadamard 6: unsupported size is rejected", false, 0.0, 0.0, {}};
    try {
      lib.plan(6);
      r.detail = "size 6 produced a plan";
    } catch (const UnsupportedSize& e) {
      r.passed = std::string(e.what()).find("size 6") != std::string::npos;
      if (!r.passed) r.detail = e.what();
    }
    out.push_back(r);
  }

  Rng rng(11);
  {
    const Matrix x = random_matrix(rng, 3, 344);
    const double denom = frobenius_norm(x);
    out.push_back(upper("hadamard 344: factored multiply matches dense",
                        frobenius_norm(subtract(lib.multiply_rows(x), matmul(x, *lib.matrix(344)))) / denom, 1e-12));
  }
  const std::size_t big = level == VerifyLevel::Full ? 11008 : 5504;
  {
    // ||x R|| == ||x|| for every x iff R R^T == I.
    const Matrix x = random_matrix(rng, 8, big);
    const Matrix y = lib.multiply_rows(x);
    double worst = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      double nx = 0.0, ny = 0.0;
      for (double v : x.row(i)) nx += v * v;
      for (double v : y.row(i)) ny += v * v;
      worst = std::max(worst, std::abs(std::sqrt(ny) / std::sqrt(nx) - 1.0));
    }
    out.push_back(upper("hadamard " + std::to_string(big) + ": factored rotation preserves norms", worst, 1e-12));
  }
}

void quantizer_checks(VerifyLevel level, std::vector<CheckResult>& out) {
  Rng rng(7);
  const int trials = level == VerifyLevel::Full ? 1000 : 200;
  std::size_t mismatches = 0;
  double worst_ratio = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int bits_choices[] = {2, 3, 4, 8};
    const QuantConfig cfg{bits_choices[t % 4], t % 2 ? Granularity::PerChannel : Granularity::PerToken,
                          t % 3 ? Rounding::HalfToEven : Rounding::HalfAwayFromZero};
    const std::size_t rows = 1 + static_cast<std::size_t>(rng.uniform() * 8);
    const std::size_t cols = 1 + static_cast<std::size_t>(rng.uniform() * 8);
    const Matrix x = random_matrix(rng, rows, cols, 3.0);
    const auto q = quantize_rtn(x, cfg);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const double step = q.steps[cfg.granularity == Granularity::PerToken ? r : c];
        if (step == 0.0) continue;
        if (q.integer_grid(r, c) != brute_force_index(x(r, c) / step, cfg.grid_max(), cfg.rounding)) ++mismatches;
        worst_ratio = std::max(worst_ratio, std::abs(x(r, c) - q.dequantized(r, c)) / step);
      }
    }
  }
  out.push_back(upper("quantizer: grid indices differing from brute force", static_cast<double>(mismatches), 0.0));
  out.push_back(upper("quantizer: max |x - Q(x)| / step", worst_ratio, 0.5 + 1e-12));
}

void equivalence_checks(const HadamardLibrary& lib, std::vector<CheckResult>& out) {
  Rng rng(3);
  for (auto kind : {TransformKind::None, TransformKind::Smooth, TransformKind::Rotate, TransformKind::SmoothRotate}) {
    double worst = 0.0;
    for (std::size_t d : {2, 4, 8, 64}) {
      const Matrix x = random_matrix(rng, 16, d);
      const Matrix w = random_matrix(rng, d, 12);
      const auto t = apply_transform(x, w, {kind, 0.5, kDefaultEpsilonClamp}, lib);
      worst = std::max(worst, verify_equivalence(x, w, t.x, t.w));
    }
    out.push_back(upper("equivalence " + std::string(to_string(kind)) + ": relative residual", worst, 1e-10));
  }
}

void centroid_check(const HadamardLibrary& lib, std::size_t d, std::vector<CheckResult>& out) {
  OutlierTokenSpec spec{d, {{5, 900.0}, {37, 500.0}, {301, 300.0}}, 0.01, 42};
  const auto token = synth_massive_token(spec);
  const Matrix rotated = lib.multiply_rows(Matrix::row_vector(token));
  const auto centroids = predict_centroids(spec, d);
  const auto cc = cluster_check(rotated.data(), centroids, spec.noise_sigma);
  const std::string name = "centroids d=" + std::to_string(d) + ", |O|=3";
  out.push_back(upper(name + ": share of entries outside 4 sigma", 1.0 - cc.fraction, 0.0));
  std::size_t worst = 0;
  for (auto c : cc.counts) worst = std::max(worst, c > d / 4 ? c - d / 4 : d / 4 - c);
  out.push_back(upper(name + ": cluster size deviation from d/4", static_cast<double>(worst), 0.0));
}

void max_checks(const HadamardLibrary& lib, std::vector<CheckResult>& out) {
  for (std::size_t d : {4, 64, 1024}) {
    OutlierTokenSpec spec{d, {{0, 8.0}, {1, 4.0}, {d - 1, 3.0}}, 0.0, 1};
    const Matrix rotated = lib.multiply_rows(Matrix::row_vector(synth_massive_token(spec)));
    const double predicted = predict_rot_max(spec, d);
    out.push_back(upper("rotated max d=" + std::to_string(d) + ", sigma=0: relative error",
                        std::abs(max_abs(rotated) - predicted) / predicted, 1e-9));
  }
  {
    OutlierTokenSpec spec{1024, {{3, 600.0}, {400, 200.0}}, 0.05, 9};
    const Matrix rotated = lib.multiply_rows(Matrix::row_vector(synth_massive_token(spec)));
    out.push_back(upper("rotated max d=1024, sigma=0.05: distance from prediction",
                        std::abs(max_abs(rotated) - predict_rot_max(spec, 1024)), rot_max_noise_band(0.05)));
  }
  {
    const std::size_t d = 1024;
    OutlierTokenSpec spec{d, {{3, 1000.0}, {400, 600.0}}, 1e-3, 5};
    Rng rng(13);
    const Matrix x = Matrix::row_vector(synth_massive_token(spec));
    const Matrix w = random_matrix(rng, d, 64, 0.05);
    const auto wmax = row_max_abs(w);
    const double predicted = predict_smooth_rot_max(spec, {{3, wmax[3]}, {400, wmax[400]}}, d);
    const auto t = smooth_rotate(x, w, {TransformKind::SmoothRotate, 0.5, kDefaultEpsilonClamp}, lib);
    out.push_back(upper("smooth-rotate max d=1024: relative error", std::abs(max_abs(t.x) - predicted) / predicted, 0.10));
  }
}

}  // namespace

std::vector<CheckResult> run_verification(VerifyLevel level, const std::optional<std::filesystem::path>& hadamard_dir) {
  std::vector<CheckResult> out;

  for (const auto& asset : asset_texts(hadamard_dir)) {
    CheckResult r{"asset " + asset.name + ": H H^T = n I", false, 0.0, 0.0, {}};
    try {
      r.measured = hadamard_defect(parse_sign_matrix(asset.text, asset.name));
      r.passed = r.measured == 0.0;
      if (!r.passed) r.detail = asset.name + " is not a Hadamard matrix";
    } catch (const Error& e) {
      r.detail = e.what();
    }
    out.push_back(r);
  }

  std::optional<HadamardLibrary> lib;
  try {
    lib = hadamard_dir ? HadamardLibrary::from_directory(*hadamard_dir) : HadamardLibrary::builtin();
  } catch (const Error& e) {
    out.push_back({"hadamard library loads", false, 0.0, 0.0, e.what()});
  }

  quantizer_checks(level, out);
  if (lib) {
    const std::vector<std::pair<const char*, std::function<void()>>> groups = {
        {"hadamard", [&] { hadamard_checks(*lib, level, out); }},
        {"equivalence", [&] { equivalence_checks(*lib, out); }},
        {"centroids", [&] {
           centroid_check(*lib, 1024, out);
           if (level == VerifyLevel::Full) centroid_check(*lib, 4096, out);
         }},
        {"maxima", [&] { max_checks(*lib, out); }},
    };
    for (const auto& [group, run] : groups) {
      try {
        run();
      } catch (const Error& e) {
        out.push_back({std::string(group) + " checks", false, 0.0, 0.0, e.what()});
      }
    }
  }
  return out;
}

}  // namespace actq
