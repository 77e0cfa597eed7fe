#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <Eigen/QR>

#include "ska/rng.hpp"
#include "ska/types.hpp"

namespace test_helpers {

/// Approximate-equality helper with both a relative tolerance and an
/// absolute floor, comparable with == from either side.
class Approx {
 public:
  explicit Approx(double v) : value_(v) {}
  Approx& epsilon(double e) {
    eps_ = e;
    return *this;
  }
  Approx& margin(double m) {
    margin_ = m;
    return *this;
  }
  friend bool operator==(double lhs, const Approx& rhs) {
    double scale = std::max(std::abs(lhs), std::abs(rhs.value_));
    return std::abs(lhs - rhs.value_) <=
           std::max(rhs.margin_, rhs.eps_ * scale);
  }
  friend bool operator==(const Approx& lhs, double rhs) { return rhs == lhs; }

 private:
  double value_;
  double eps_ = 1e-12;
  double margin_ = 0.0;
};

using ska::Index;
using ska::Matrix;
using ska::Vector;

inline Matrix rand_matrix(Index rows, Index cols, std::uint64_t seed) {
  ska::CounterRng rng(seed);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.next_gaussian();
  return m;
}

inline Vector rand_vector(Index n, std::uint64_t seed) {
  ska::CounterRng rng(seed);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.next_gaussian();
  return v;
}

inline Matrix rand_orthonormal(Index rows, Index cols, std::uint64_t seed) {
  Matrix g = rand_matrix(rows, cols, seed);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

/// Random matrix with unit-norm columns.
inline Matrix rand_unit_columns(Index rows, Index cols, std::uint64_t seed) {
  Matrix m = rand_matrix(rows, cols, seed);
  for (Index j = 0; j < cols; ++j) m.col(j).normalize();
  return m;
}

}  // namespace test_helpers
