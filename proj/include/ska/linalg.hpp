#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ska/types.hpp"

namespace ska {

/// Singular values in descending order. Tall matrices are reduced to their
/// triangular QR factor first, then decomposed with Jacobi rotations, which
/// keeps the small singular values accurate.
inline Vector singular_values(const Matrix& m) {
  if (m.size() == 0) throw std::invalid_argument("singular_values: empty");
  if (m.rows() > m.cols()) {
    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix r = qr.matrixQR()
                   .topRows(m.cols())
                   .template triangularView<Eigen::Upper>();
    return Eigen::JacobiSVD<Matrix>(r).singularValues();
  }
  return Eigen::JacobiSVD<Matrix>(m).singularValues();
}

inline double cond2(const Matrix& m) {
  Vector s = singular_values(m);
  double smin = s[s.size() - 1];
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s[0] / smin;
}

/// Minimum-norm least-squares solution of m h = rhs. Numerical rank is set
/// by singular values below max(rows,cols) * eps * sigma_max.
inline Vector least_squares(const Matrix& m, const Vector& rhs) {
  if (m.size() == 0) throw std::invalid_argument("least_squares: empty matrix");
  if (rhs.size() != m.rows())
    throw std::invalid_argument("least_squares: rhs length mismatch");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  double tol = static_cast<double>(std::max(m.rows(), m.cols())) *
               std::numeric_limits<double>::epsilon() * s[0];
  Vector utb = svd.matrixU().transpose() * rhs;
  for (Index i = 0; i < s.size(); ++i)
    utb[i] = (s[i] > tol) ? utb[i] / s[i] : 0.0;
  return svd.matrixV() * utb;
}

/// QR factorization grown one column at a time via compact Householder
/// reflectors. Appending costs O(rows * cols); the R diagonal is kept
/// non-negative through a per-column sign.
class QrUpdatable {
 public:
  explicit QrUpdatable(Index nrows) : nrows_(nrows) {}

  Index rows() const { return nrows_; }
  Index cols() const { return ncols_; }

  void append_column(const Vector& col) {
    if (col.size() != nrows_)
      throw std::invalid_argument("QrUpdatable: column length mismatch");
    if (ncols_ >= nrows_)
      throw std::invalid_argument("QrUpdatable: more columns than rows");
    Vector work = col;
    apply_reflectors(work);
    const Index j = ncols_;
    // Householder vector annihilating work[j+1..end); the stable sign choice
    // maps the pivot to -sign(pivot)*norm, so a per-row sign flip keeps the
    // stored R diagonal non-negative.
    Vector v = Vector::Zero(nrows_);
    double tail_norm = work.tail(nrows_ - j).norm();
    double sign = 1.0;
    if (tail_norm > 0.0) {
      double pivot = work[j];
      double alpha = (pivot >= 0.0) ? -tail_norm : tail_norm;
      v.tail(nrows_ - j) = work.tail(nrows_ - j);
      v[j] -= alpha;
      double vnorm = v.norm();
      if (vnorm > 0.0) v /= vnorm;
      sign = (alpha < 0.0) ? -1.0 : 1.0;
    }
    reflectors_.conservativeResize(nrows_, j + 1);
    reflectors_.col(j) = v;
    signs_.conservativeResize(j + 1);
    signs_[j] = sign;
    r_.conservativeResize(j + 1, j + 1);
    r_.row(j).setZero();
    for (Index i = 0; i < j; ++i) r_(i, j) = signs_[i] * work[i];
    r_(j, j) = tail_norm;
    ++ncols_;
  }

  /// Q^T rhs restricted to the leading ncols entries.
  Vector qt_head(const Vector& rhs) const {
    Vector w = rhs;
    apply_reflectors(w);
    return w.head(ncols_).cwiseProduct(signs_);
  }

  /// Least-squares solution for the committed columns.
  Vector solve(const Vector& rhs) const {
    if (rhs.size() != nrows_)
      throw std::invalid_argument("QrUpdatable: rhs length mismatch");
    Vector head = qt_head(rhs);
    return r_.template triangularView<Eigen::Upper>().solve(head);
  }

  /// Norm of the least-squares residual, read off the reflected tail.
  double residual_norm(const Vector& rhs) const {
    Vector w = rhs;
    apply_reflectors(w);
    return w.tail(nrows_ - ncols_).norm();
  }

  const Matrix& r() const { return r_; }

  double min_diag() const {
    double d = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < ncols_; ++i) d = std::min(d, r_(i, i));
    return d;
  }

  /// Re-applies the stored transform to R, recovering the committed columns.
  Matrix reconstruct() const {
    Matrix full = Matrix::Zero(nrows_, ncols_);
    full.topRows(ncols_) = signs_.asDiagonal() * r_;
    for (Index j = ncols_ - 1; j >= 0; --j) {
      const Vector& v = reflectors_.col(j);
      if (v.squaredNorm() > 0.0)
        full -= 2.0 * v * (v.transpose() * full);
    }
    return full;
  }

 private:
  void apply_reflectors(Vector& w) const {
    for (Index j = 0; j < ncols_; ++j) {
      const Vector& v = reflectors_.col(j);
      if (v.squaredNorm() > 0.0) w -= 2.0 * v * v.dot(w);
    }
  }

  Index nrows_;
  Index ncols_ = 0;
  Matrix reflectors_;  // one Householder vector per committed column
  Vector signs_;
  Matrix r_;
};

}  // namespace ska
