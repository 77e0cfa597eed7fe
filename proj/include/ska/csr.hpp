#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "ska/types.hpp"

namespace ska {

/// Sparse matrix in compressed-row storage. Column indices within a row are
/// strictly increasing; all values are finite.
struct CsrMatrix {
  Index nrows = 0;
  Index ncols = 0;
  std::vector<Index> row_ptr;  // length nrows+1
  std::vector<Index> col_idx;
  std::vector<double> values;

  Index nnz() const { return static_cast<Index>(values.size()); }

  void validate() const {
    if (row_ptr.size() != static_cast<std::size_t>(nrows) + 1)
      throw std::invalid_argument("CsrMatrix: row_ptr length mismatch");
    if (row_ptr.front() != 0 || row_ptr.back() != nnz())
      throw std::invalid_argument("CsrMatrix: bad row_ptr endpoints");
    for (Index r = 0; r < nrows; ++r) {
      if (row_ptr[r] > row_ptr[r + 1])
        throw std::invalid_argument("CsrMatrix: row_ptr not non-decreasing");
      for (Index p = row_ptr[r]; p < row_ptr[r + 1]; ++p) {
        if (col_idx[p] < 0 || col_idx[p] >= ncols)
          throw std::invalid_argument("CsrMatrix: column index out of range");
        if (p > row_ptr[r] && col_idx[p] <= col_idx[p - 1])
          throw std::invalid_argument(
              "CsrMatrix: column indices not strictly increasing");
        if (!std::isfinite(values[p]))
          throw std::invalid_argument("CsrMatrix: non-finite value");
      }
    }
  }

  /// Builds from (row, col, value) triplets; duplicates are summed.
  static CsrMatrix from_triplets(
      Index nrows, Index ncols,
      std::vector<std::tuple<Index, Index, double>> triplets) {
    std::sort(triplets.begin(), triplets.end(),
              [](const auto& a, const auto& b) {
                return std::tie(std::get<0>(a), std::get<1>(a)) <
                       std::tie(std::get<0>(b), std::get<1>(b));
              });
    CsrMatrix m;
    m.nrows = nrows;
    m.ncols = ncols;
    m.row_ptr.assign(static_cast<std::size_t>(nrows) + 1, 0);
    for (std::size_t i = 0; i < triplets.size();) {
      auto [r, c, v] = triplets[i];
      std::size_t j = i + 1;
      while (j < triplets.size() && std::get<0>(triplets[j]) == r &&
             std::get<1>(triplets[j]) == c) {
        v += std::get<2>(triplets[j]);
        ++j;
      }
      m.col_idx.push_back(c);
      m.values.push_back(v);
      m.row_ptr[static_cast<std::size_t>(r) + 1]++;
      i = j;
    }
    for (Index r = 0; r < nrows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
    m.validate();
    return m;
  }

  Matrix to_dense() const {
    Matrix d = Matrix::Zero(nrows, ncols);
    for (Index r = 0; r < nrows; ++r)
      for (Index p = row_ptr[r]; p < row_ptr[r + 1]; ++p)
        d(r, col_idx[p]) += values[p];
    return d;
  }
};

inline Vector spmv(const CsrMatrix& a, const Vector& x) {
  if (x.size() != a.ncols)
    throw std::invalid_argument("spmv: dimension mismatch");
  Vector y = Vector::Zero(a.nrows);
  for (Index r = 0; r < a.nrows; ++r) {
    double acc = 0.0;
    for (Index p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p)
      acc += a.values[p] * x[a.col_idx[p]];
    y[r] = acc;
  }
  return y;
}

/// Frobenius norm, used for relative tolerances on ||A||.
inline double frob_norm(const CsrMatrix& a) {
  double s = 0.0;
  for (double v : a.values) s += v * v;
  return std::sqrt(s);
}

}  // namespace ska
