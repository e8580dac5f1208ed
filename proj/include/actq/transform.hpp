#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "actq/hadamard.hpp"
#include "actq/tensor.hpp"

namespace actq {

enum class TransformKind { None, Smooth, Rotate, SmoothRotate };

/// "none", "smooth", "rotate", "smooth-rotate".
std::string_view to_string(TransformKind kind);
/// Inverse of to_string; throws InvalidArgument listing the valid names.
TransformKind parse_transform_kind(std::string_view name);

inline constexpr double kDefaultAlpha = 0.5;
inline constexpr double kDefaultEpsilonClamp = 1e-8;

struct TransformSpec {
  TransformKind kind = TransformKind::None;
  double alpha = kDefaultAlpha;  // migration strength, used by the smoothing kinds
  double epsilon_clamp = kDefaultEpsilonClamp;

  /// Throws InvalidArgument unless 0 < alpha < 1 and epsilon_clamp > 0.
  void validate() const;
};

/// An equivalently transformed (X, W) pair: X_hat * W_hat == X * W.
struct TransformedPair {
  Matrix x;
  Matrix w;
};

/// Per-channel smoothing factors
///   s_j = max|X_j|^alpha / max|W_j|^(1 - alpha)
/// where X_j is column j of X and W_j is row j of W. A maximum below
/// `epsilon_clamp` is replaced by the clamp.
std::vector<double> smoothing_scale(const Matrix& x, const Matrix& w, double alpha,
                                    double epsilon_clamp = kDefaultEpsilonClamp);

/// X diag(s)^-1 and diag(s) W.
TransformedPair apply_smoothing(const Matrix& x, const Matrix& w, std::span<const double> s);

/// X R and R^T W for an orthogonal R. Throws ComputationError when
/// ||R R^T - I||_F exceeds kOrthogonalityTolerance.
TransformedPair apply_rotation(const Matrix& x, const Matrix& w, const Matrix& r);

inline constexpr double kOrthogonalityTolerance = 1e-8;

/// ||R R^T - I||_F. Exact for orders up to 512; larger orders use a
/// randomized estimate from a fixed set of Gaussian probe vectors
/// (E||(R R^T - I) v||^2 = ||R R^T - I||_F^2 for unit-variance v).
double orthogonality_residual(const Matrix& r);

/// Rotation by the Hadamard matrix of order c_in, applied through the
/// Kronecker-factored fast path (the dense matrix is never formed).
TransformedPair apply_hadamard_rotation(const Matrix& x, const Matrix& w,
                                        const HadamardLibrary& lib = HadamardLibrary::builtin());

/// Smoothing at spec.alpha followed by Hadamard rotation of the smoothed pair.
TransformedPair smooth_rotate(const Matrix& x, const Matrix& w, const TransformSpec& spec,
                              const HadamardLibrary& lib = HadamardLibrary::builtin());

/// Dispatches on spec.kind.
TransformedPair apply_transform(const Matrix& x, const Matrix& w, const TransformSpec& spec,
                                const HadamardLibrary& lib = HadamardLibrary::builtin());

/// ||XW - X_hat W_hat||_F / max(||XW||_F, tiny).
double verify_equivalence(const Matrix& x, const Matrix& w, const Matrix& xt, const Matrix& wt);

}  // namespace actq
