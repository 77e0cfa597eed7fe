#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ska/linalg.hpp"
#include "ska/rng.hpp"
#include "ska/types.hpp"

namespace ska {

/// In-place fast Walsh-Hadamard transform; size must be a power of two.
/// Unnormalized butterflies: the result is H_n x with H_n entries +-1.
inline void fwht_inplace(Vector& x) {
  const Index n = x.size();
  if (n & (n - 1))
    throw std::invalid_argument("fwht_inplace: size not a power of two");
  for (Index h = 1; h < n; h *= 2) {
    for (Index i = 0; i < n; i += 2 * h) {
      for (Index j = i; j < i + h; ++j) {
        double a = x[j];
        double b = x[j + h];
        x[j] = a + b;
        x[j + h] = a - b;
      }
    }
  }
}

enum class SketchKind { srht, gaussian, identity };

/// Linear embedding S in R^{s x n}, applied as an operator. Construction is
/// fully determined by (kind, n, s, seed); apply is reentrant.
class SketchOperator {
 public:
  /// Subsampled random Hadamard transform: sign flips, orthonormal Hadamard
  /// on the zero-padded vector, s rows sampled without replacement, scaled
  /// by sqrt(padded/s) so that E||Sx||^2 = ||x||^2.
  static SketchOperator srht(Index n, Index s, std::uint64_t seed) {
    SketchOperator op(SketchKind::srht, n, s, seed);
    Index padded = 1;
    while (padded < n) padded *= 2;
    if (s <= 0 || s > padded)
      throw std::invalid_argument("srht: need 0 < s <= padded dimension");
    op.padded_ = padded;
    CounterRng rng(seed);
    op.signs_.resize(padded);
    for (Index i = 0; i < padded; ++i) op.signs_[i] = rng.next_sign();
    // Fisher-Yates prefix: first s entries of a random permutation.
    std::vector<Index> perm(padded);
    for (Index i = 0; i < padded; ++i) perm[i] = i;
    for (Index i = 0; i < s; ++i) {
      Index j = i + static_cast<Index>(
                        rng.next_below(static_cast<std::uint64_t>(padded - i)));
      std::swap(perm[i], perm[j]);
    }
    op.sample_.assign(perm.begin(), perm.begin() + s);
    op.scale_ = std::sqrt(static_cast<double>(padded) /
                          static_cast<double>(s)) /
                std::sqrt(static_cast<double>(padded));
    return op;
  }

  /// Dense i.i.d. N(0, 1/s) operator; rows generated on the fly from the
  /// counter stream, so nothing is materialized. Slow reference path.
  static SketchOperator gaussian(Index n, Index s, std::uint64_t seed) {
    if (s <= 0) throw std::invalid_argument("gaussian: s must be positive");
    return SketchOperator(SketchKind::gaussian, n, s, seed);
  }

  static SketchOperator identity(Index n) {
    return SketchOperator(SketchKind::identity, n, n, 0);
  }

  Index rows() const { return s_; }
  Index cols() const { return n_; }
  SketchKind kind() const { return kind_; }

  Vector apply(const Vector& x) const {
    if (x.size() != n_)
      throw std::invalid_argument("SketchOperator: input length mismatch");
    switch (kind_) {
      case SketchKind::identity:
        return x;
      case SketchKind::srht: {
        Vector padded = Vector::Zero(padded_);
        padded.head(n_) = signs_.head(n_).cwiseProduct(x);
        fwht_inplace(padded);
        Vector out(s_);
        for (Index i = 0; i < s_; ++i) out[i] = scale_ * padded[sample_[i]];
        return out;
      }
      case SketchKind::gaussian: {
        Vector out(s_);
        const double inv_sqrt_s = 1.0 / std::sqrt(static_cast<double>(s_));
        for (Index i = 0; i < s_; ++i) {
          CounterRng rng(seed_, 2 * static_cast<std::uint64_t>(i) *
                                    static_cast<std::uint64_t>(n_));
          double acc = 0.0;
          for (Index j = 0; j < n_; ++j) acc += rng.next_gaussian() * x[j];
          out[i] = acc * inv_sqrt_s;
        }
        return out;
      }
    }
    throw std::logic_error("SketchOperator: unreachable");
  }

  Matrix apply_columns(const Matrix& m) const {
    Matrix out(s_, m.cols());
    for (Index c = 0; c < m.cols(); ++c) out.col(c) = apply(Vector(m.col(c)));
    return out;
  }

  /// Dense s x n assembly, for small verification cases only.
  Matrix to_dense() const {
    Matrix d(s_, n_);
    Vector e = Vector::Zero(n_);
    for (Index j = 0; j < n_; ++j) {
      e[j] = 1.0;
      d.col(j) = apply(e);
      e[j] = 0.0;
    }
    return d;
  }

 private:
  SketchOperator(SketchKind kind, Index n, Index s, std::uint64_t seed)
      : kind_(kind), n_(n), s_(s), seed_(seed) {}

  SketchKind kind_;
  Index n_;
  Index s_;
  std::uint64_t seed_;
  Index padded_ = 0;
  Vector signs_;
  std::vector<Index> sample_;
  double scale_ = 1.0;
};

/// Smallest eps such that (1-eps)||v|| <= ||Sv|| <= (1+eps)||v|| holds on
/// the whole span of basis: max(1 - smin, smax - 1) over the singular values
/// of S Q, Q an orthonormalization of basis.
inline double embedding_distortion(const SketchOperator& op,
                                   const Matrix& basis) {
  if (basis.cols() > op.rows())
    throw std::invalid_argument(
        "embedding_distortion: subspace dimension exceeds sketch size");
  Eigen::HouseholderQR<Matrix> qr(basis);
  Matrix q = Matrix::Identity(basis.rows(), basis.cols());
  q = qr.householderQ() * q;
  Vector sv = singular_values(op.apply_columns(q));
  double smin = sv[sv.size() - 1];
  double smax = sv[0];
  return std::max(1.0 - smin, smax - 1.0);
}

}  // namespace ska
