#pragma once

#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ska/csr.hpp"
#include "ska/rng.hpp"
#include "ska/types.hpp"

namespace ska {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, long line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

namespace detail {
inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}
}  // namespace detail

/// Matrix Market reader: coordinate or array format, real or integer field,
/// general / symmetric / skew-symmetric. Symmetric storage is expanded to
/// full; duplicate coordinate entries are summed.
inline CsrMatrix read_matrix_market(std::istream& in) {
  std::string line;
  long lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty file", 1);
  ++lineno;
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || detail::lower(object) != "matrix")
    throw ParseError("not a MatrixMarket matrix header", lineno);
  format = detail::lower(format);
  field = detail::lower(field);
  symmetry = detail::lower(symmetry);
  if (format != "coordinate" && format != "array")
    throw ParseError("unsupported format '" + format + "'", lineno);
  if (field == "complex" || field == "pattern")
    throw ParseError("unsupported field '" + field + "'", lineno);
  if (field != "real" && field != "integer" && field != "double")
    throw ParseError("unsupported field '" + field + "'", lineno);
  if (symmetry != "general" && symmetry != "symmetric" &&
      symmetry != "skew-symmetric")
    throw ParseError("unsupported symmetry '" + symmetry + "'", lineno);

  // Skip comments and blank lines.
  auto next_data_line = [&](std::string& out) {
    while (std::getline(in, line)) {
      ++lineno;
      std::size_t pos = line.find_first_not_of(" \t\r");
      if (pos == std::string::npos || line[pos] == '%') continue;
      out = line;
      return true;
    }
    return false;
  };

  std::string sizes;
  if (!next_data_line(sizes)) throw ParseError("missing size line", lineno);
  std::istringstream size_stream(sizes);
  long nrows = 0, ncols = 0, nnz = 0;
  if (format == "coordinate") {
    if (!(size_stream >> nrows >> ncols >> nnz))
      throw ParseError("bad coordinate size line", lineno);
  } else {
    if (!(size_stream >> nrows >> ncols))
      throw ParseError("bad array size line", lineno);
    nnz = nrows * ncols;
  }
  if (nrows <= 0 || ncols <= 0)
    throw ParseError("non-positive dimensions", lineno);

  std::vector<std::tuple<Index, Index, double>> trips;
  if (format == "coordinate") {
    for (long e = 0; e < nnz; ++e) {
      std::string data;
      if (!next_data_line(data))
        throw ParseError("unexpected end of file, expected " +
                             std::to_string(nnz) + " entries",
                         lineno);
      std::istringstream es(data);
      long r, c;
      double v;
      if (!(es >> r >> c >> v)) throw ParseError("malformed entry", lineno);
      if (r < 1 || r > nrows || c < 1 || c > ncols)
        throw ParseError("index out of range", lineno);
      if (!std::isfinite(v)) throw ParseError("non-finite value", lineno);
      trips.emplace_back(r - 1, c - 1, v);
      if (r != c) {
        if (symmetry == "symmetric") trips.emplace_back(c - 1, r - 1, v);
        if (symmetry == "skew-symmetric") trips.emplace_back(c - 1, r - 1, -v);
      }
    }
  } else {
    // Array format: column-major dense. Symmetric variants store the lower
    // triangle only.
    bool lower_only = symmetry != "general";
    for (long c = 1; c <= ncols; ++c) {
      long r0 = lower_only ? c : 1;
      if (symmetry == "skew-symmetric") r0 = c + 1;
      for (long r = r0; r <= nrows; ++r) {
        std::string data;
        if (!next_data_line(data))
          throw ParseError("unexpected end of file in array data", lineno);
        std::istringstream es(data);
        double v;
        if (!(es >> v)) throw ParseError("malformed array entry", lineno);
        if (!std::isfinite(v)) throw ParseError("non-finite value", lineno);
        if (v != 0.0) {
          trips.emplace_back(r - 1, c - 1, v);
          if (r != c) {
            if (symmetry == "symmetric") trips.emplace_back(c - 1, r - 1, v);
            if (symmetry == "skew-symmetric")
              trips.emplace_back(c - 1, r - 1, -v);
          }
        }
      }
    }
  }
  return CsrMatrix::from_triplets(nrows, ncols, std::move(trips));
}

inline CsrMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_matrix_market(in);
}

/// Writes 1-based general coordinate format, full precision.
inline void write_matrix_market(std::ostream& out, const CsrMatrix& a) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.nrows << " " << a.ncols << " " << a.nnz() << "\n";
  char buf[64];
  for (Index r = 0; r < a.nrows; ++r)
    for (Index p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) {
      std::snprintf(buf, sizeof(buf), "%ld %ld %.17g", static_cast<long>(r + 1),
                    static_cast<long>(a.col_idx[p] + 1), a.values[p]);
      out << buf << "\n";
    }
}

inline void write_matrix_market(const std::string& path, const CsrMatrix& a) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_matrix_market(out, a);
}

// ---- synthetic generators ----

/// 5-point convection-diffusion stencil on a grid x grid unit square with
/// central-difference convection in both coordinates; peclet = 0 gives the
/// symmetric Laplacian.
inline CsrMatrix conv_diff_2d(Index grid, double peclet) {
  if (grid < 1) throw std::invalid_argument("conv_diff_2d: grid >= 1");
  const Index n = grid * grid;
  const double h = 1.0 / static_cast<double>(grid + 1);
  const double c = peclet * h / 2.0;
  std::vector<std::tuple<Index, Index, double>> trips;
  auto id = [grid](Index ix, Index iy) { return iy * grid + ix; };
  for (Index iy = 0; iy < grid; ++iy)
    for (Index ix = 0; ix < grid; ++ix) {
      Index row = id(ix, iy);
      trips.emplace_back(row, row, 4.0);
      if (ix > 0) trips.emplace_back(row, id(ix - 1, iy), -1.0 - c);
      if (ix < grid - 1) trips.emplace_back(row, id(ix + 1, iy), -1.0 + c);
      if (iy > 0) trips.emplace_back(row, id(ix, iy - 1), -1.0 - c);
      if (iy < grid - 1) trips.emplace_back(row, id(ix, iy + 1), -1.0 + c);
    }
  return CsrMatrix::from_triplets(n, n, std::move(trips));
}

/// Subdiagonal of ones: A e_j = e_{j+1} for j < n.
inline CsrMatrix shift_matrix(Index n) {
  if (n < 2) throw std::invalid_argument("shift_matrix: n >= 2");
  std::vector<std::tuple<Index, Index, double>> trips;
  for (Index j = 0; j + 1 < n; ++j) trips.emplace_back(j + 1, j, 1.0);
  return CsrMatrix::from_triplets(n, n, std::move(trips));
}

/// Tridiagonal Toeplitz: diagonal a, subdiagonal b, superdiagonal c.
/// Eigenvalues are a + 2 sqrt(b c) cos(pi j / (n+1)).
inline CsrMatrix tridiag_toeplitz(Index n, double a, double b, double c) {
  if (n < 1) throw std::invalid_argument("tridiag_toeplitz: n >= 1");
  std::vector<std::tuple<Index, Index, double>> trips;
  for (Index i = 0; i < n; ++i) {
    trips.emplace_back(i, i, a);
    if (i > 0) trips.emplace_back(i, i - 1, b);
    if (i + 1 < n) trips.emplace_back(i, i + 1, c);
  }
  return CsrMatrix::from_triplets(n, n, std::move(trips));
}

/// Dense nonsymmetric matrix Q1 D Q2^T with log-spaced singular values in
/// [1/cond, 1]; Q1, Q2 from QR of seeded Gaussian matrices.
inline CsrMatrix dense_random_spectrum(Index n, double cond,
                                       std::uint64_t seed) {
  if (n < 1 || cond < 1.0)
    throw std::invalid_argument("dense_random_spectrum: n >= 1, cond >= 1");
  CounterRng rng(seed);
  Matrix g1(n, n), g2(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      g1(i, j) = rng.next_gaussian();
      g2(i, j) = rng.next_gaussian();
    }
  Matrix q1 = Eigen::HouseholderQR<Matrix>(g1).householderQ();
  Matrix q2 = Eigen::HouseholderQR<Matrix>(g2).householderQ();
  Vector d(n);
  for (Index i = 0; i < n; ++i)
    d[i] = (n == 1) ? 1.0
                    : std::pow(cond, -static_cast<double>(i) /
                                         static_cast<double>(n - 1));
  Matrix a = q1 * d.asDiagonal() * q2.transpose();
  std::vector<std::tuple<Index, Index, double>> trips;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) trips.emplace_back(i, j, a(i, j));
  return CsrMatrix::from_triplets(n, n, std::move(trips));
}

/// Parses "name:p1,p2,..." generator specs used by the CLI.
inline CsrMatrix generate(const std::string& spec) {
  std::string name = spec;
  std::vector<double> params;
  if (auto colon = spec.find(':'); colon != std::string::npos) {
    name = spec.substr(0, colon);
    std::string rest = spec.substr(colon + 1);
    std::istringstream rs(rest);
    std::string tok;
    while (std::getline(rs, tok, ',')) params.push_back(std::stod(tok));
  }
  auto arg = [&](std::size_t i, double fallback) {
    return i < params.size() ? params[i] : fallback;
  };
  if (name == "conv_diff_2d")
    return conv_diff_2d(static_cast<Index>(arg(0, 16)), arg(1, 0.0));
  if (name == "shift") return shift_matrix(static_cast<Index>(arg(0, 64)));
  if (name == "tridiag_toeplitz")
    return tridiag_toeplitz(static_cast<Index>(arg(0, 64)), arg(1, 2.0),
                            arg(2, -1.0), arg(3, -1.0));
  if (name == "dense_random_spectrum")
    return dense_random_spectrum(static_cast<Index>(arg(0, 64)), arg(1, 100.0),
                                 static_cast<std::uint64_t>(arg(2, 0)));
  throw std::invalid_argument("unknown generator '" + name + "'");
}

// ---- right-hand sides ----

enum class RhsKind { gaussian, e1, e1_perturbed, ones };

inline RhsKind parse_rhs(const std::string& name) {
  if (name == "gaussian") return RhsKind::gaussian;
  if (name == "e1") return RhsKind::e1;
  if (name == "e1pert") return RhsKind::e1_perturbed;
  if (name == "ones") return RhsKind::ones;
  throw std::invalid_argument("unknown rhs kind '" + name + "'");
}

inline Vector make_rhs(RhsKind kind, Index n, std::uint64_t seed,
                       double delta = 1e-15) {
  Vector b(n);
  switch (kind) {
    case RhsKind::gaussian: {
      CounterRng rng(seed);
      for (Index i = 0; i < n; ++i) b[i] = rng.next_gaussian();
      break;
    }
    case RhsKind::e1:
      b.setZero();
      b[0] = 1.0;
      break;
    case RhsKind::e1_perturbed:
      b.setConstant(delta);
      b[0] += 1.0;
      break;
    case RhsKind::ones:
      b.setOnes();
      break;
  }
  return b;
}

}  // namespace ska
