#include "actq/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "actq/error.hpp"
#include "actq/rng.hpp"

namespace actq {

namespace {

void require_pair(const Matrix& x, const Matrix& w, const char* op) {
  if (x.cols() != w.rows()) {
    throw ShapeError(std::string(op) + ": activation has " + std::to_string(x.cols()) +
                     " channels but weight has " + std::to_string(w.rows()) + " rows");
  }
}

constexpr std::size_t kExactOrthogonalityLimit = 512;
constexpr int kOrthogonalityProbes = 8;
constexpr std::uint64_t kProbeSeed = 0x5eed0f0a7e;

}  // namespace

std::string_view to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::None: return "none";
    case TransformKind::Smooth: return "smooth";
    case TransformKind::Rotate: return "rotate";
    case TransformKind::SmoothRotate: return "smooth-rotate";
  }
  return "unknown";
}

TransformKind parse_transform_kind(std::string_view name) {
  for (auto kind : {TransformKind::None, TransformKind::Smooth, TransformKind::Rotate,
                    TransformKind::SmoothRotate}) {
    if (name == to_string(kind)) return kind;
  }
  throw InvalidArgument("unknown transform '" + std::string(name) +
                        "' (expected none, smooth, rotate, smooth-rotate)");
}

void TransformSpec::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument("migration strength alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  if (!(epsilon_clamp > 0.0)) throw InvalidArgument("epsilon_clamp must be positive");
}

std::vector<double> smoothing_scale(const Matrix& x, const Matrix& w, double alpha,
                                    double epsilon_clamp) {
  require_pair(x, w, "smoothing_scale");
  TransformSpec{TransformKind::Smooth, alpha, epsilon_clamp}.validate();
  const auto x_max = column_max_abs(x);
  const auto w_max = row_max_abs(w);
  std::vector<double> s(x.cols());
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double xm = std::max(x_max[j], epsilon_clamp);
    const double wm = std::max(w_max[j], epsilon_clamp);
    s[j] = std::pow(xm, alpha) / std::pow(wm, 1.0 - alpha);
  }
  return s;
}

TransformedPair apply_smoothing(const Matrix& x, const Matrix& w, std::span<const double> s) {
  require_pair(x, w, "apply_smoothing");
  if (s.size() != x.cols()) {
    throw ShapeError("apply_smoothing: " + std::to_string(s.size()) + " scales for " +
                     std::to_string(x.cols()) + " channels");
  }
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (!(s[j] > 0.0) || !std::isfinite(s[j])) {
      throw InvalidArgument("apply_smoothing: scale for channel " + std::to_string(j) +
                            " must be positive and finite");
    }
  }
  std::vector<double> xd(x.data().begin(), x.data().end());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t j = 0; j < x.cols(); ++j) xd[r * x.cols() + j] /= s[j];
  }
  std::vector<double> wd(w.data().begin(), w.data().end());
  for (std::size_t j = 0; j < w.rows(); ++j) {
    for (std::size_t c = 0; c < w.cols(); ++c) wd[j * w.cols() + c] *= s[j];
  }
  return {Matrix(x.rows(), x.cols(), std::move(xd)), Matrix(w.rows(), w.cols(), std::move(wd))};
}

double orthogonality_residual(const Matrix& r) {
  if (r.rows() != r.cols()) throw ShapeError("orthogonality_residual: matrix is not square");
  const std::size_t n = r.rows();
  if (n <= kExactOrthogonalityLimit) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ri = r.row(i);
      for (std::size_t j = 0; j < n; ++j) {
        const auto rj = r.row(j);
        double dot = 0.0;
        for (std::size_t k = 0; k < n; ++k) dot += ri[k] * rj[k];
        const double diff = dot - (i == j ? 1.0 : 0.0);
        acc += diff * diff;
      }
    }
    return std::sqrt(acc);
  }
  Rng rng(kProbeSeed);
  double acc = 0.0;
  for (int p = 0; p < kOrthogonalityProbes; ++p) {
    std::vector<double> v(n);
    for (double& e : v) e = rng.normal();
    // u = R^T v, then R u - v
    const Matrix u = matmul(Matrix::row_vector(v), r);
    const Matrix back = matmul(u, r.transposed());
    for (std::size_t k = 0; k < n; ++k) {
      const double diff = back(0, k) - v[k];
      acc += diff * diff;
    }
  }
  return std::sqrt(acc / kOrthogonalityProbes);
}

TransformedPair apply_rotation(const Matrix& x, const Matrix& w, const Matrix& r) {
  require_pair(x, w, "apply_rotation");
  if (r.rows() != r.cols() || r.rows() != x.cols()) {
    throw ShapeError("apply_rotation: rotation is " + std::to_string(r.rows()) + "x" +
                     std::to_string(r.cols()) + " but there are " + std::to_string(x.cols()) +
                     " channels");
  }
  const double residual = orthogonality_residual(r);
  if (!(residual <= kOrthogonalityTolerance)) {
    throw ComputationError("apply_rotation: matrix is not orthogonal, ||R R^T - I||_F = " +
                           std::to_string(residual));
  }
  return {matmul(x, r), matmul(r.transposed(), w)};
}

TransformedPair apply_hadamard_rotation(const Matrix& x, const Matrix& w,
                                        const HadamardLibrary& lib) {
  require_pair(x, w, "apply_hadamard_rotation");
  // R^T W == (W^T R)^T
  return {lib.multiply_rows(x), lib.multiply_rows(w.transposed()).transposed()};
}

TransformedPair smooth_rotate(const Matrix& x, const Matrix& w, const TransformSpec& spec,
                              const HadamardLibrary& lib) {
  spec.validate();
  const auto s = smoothing_scale(x, w, spec.alpha, spec.epsilon_clamp);
  const auto smoothed = apply_smoothing(x, w, s);
  return apply_hadamard_rotation(smoothed.x, smoothed.w, lib);
}

TransformedPair apply_transform(const Matrix& x, const Matrix& w, const TransformSpec& spec,
                                const HadamardLibrary& lib) {
  require_pair(x, w, "apply_transform");
  switch (spec.kind) {
    case TransformKind::None:
      return {x, w};
    case TransformKind::Smooth:
      spec.validate();
      return apply_smoothing(x, w, smoothing_scale(x, w, spec.alpha, spec.epsilon_clamp));
    case TransformKind::Rotate:
      return apply_hadamard_rotation(x, w, lib);
    case TransformKind::SmoothRotate:
      return smooth_rotate(x, w, spec, lib);
  }
  throw InvalidArgument("unknown transform kind");
}

double verify_equivalence(const Matrix& x, const Matrix& w, const Matrix& xt, const Matrix& wt) {
  const Matrix reference = matmul(x, w);
  const Matrix transformed = matmul(xt, wt);
  if (reference.rows() != transformed.rows() || reference.cols() != transformed.cols()) {
    throw ShapeError("verify_equivalence: products have different shapes");
  }
  const double denom = std::max(frobenius_norm(reference), std::numeric_limits<double>::min());
  return frobenius_norm(subtract(reference, transformed)) / denom;
}

}  // namespace actq
