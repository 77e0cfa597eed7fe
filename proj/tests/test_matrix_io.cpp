#include <doctest.h>

TEST_SUITE_BEGIN("matrixio");

#include <sstream>

#include "helpers.hpp"
#include "ska/linalg.hpp"
#include "ska/matrix_io.hpp"

#include <Eigen/Eigenvalues>

using namespace ska;

TEST_CASE("coordinate file parses to diag(1,2)") {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real general\n"
      "% comment line\n"
      "2 2 2\n"
      "1 1 1.0\n"
      "2 2 2.0\n");
  CsrMatrix a = read_matrix_market(in);
  Matrix d = a.to_dense();
  REQUIRE(d(0, 0) == 1.0);
  REQUIRE(d(1, 1) == 2.0);
  REQUIRE(d(0, 1) == 0.0);
}

TEST_CASE("array format parses column-major") {
  std::istringstream in(
      "%%MatrixMarket matrix array real general\n"
      "2 2\n"
      "1\n3\n2\n4\n");
  Matrix d = read_matrix_market(in).to_dense();
  REQUIRE(d(0, 0) == 1.0);
  REQUIRE(d(1, 0) == 3.0);
  REQUIRE(d(0, 1) == 2.0);
  REQUIRE(d(1, 1) == 4.0);
}

TEST_CASE("symmetric storage expands to full") {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real symmetric\n"
      "3 3 3\n"
      "1 1 2.0\n"
      "2 1 5.0\n"
      "3 3 1.0\n");
  Matrix d = read_matrix_market(in).to_dense();
  REQUIRE(d(0, 1) == 5.0);
  REQUIRE(d(1, 0) == 5.0);
  REQUIRE(d(0, 0) == 2.0);
}

TEST_CASE("skew-symmetric storage expands with sign flip") {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real skew-symmetric\n"
      "2 2 1\n"
      "2 1 3.0\n");
  Matrix d = read_matrix_market(in).to_dense();
  REQUIRE(d(1, 0) == 3.0);
  REQUIRE(d(0, 1) == -3.0);
}

TEST_CASE("duplicate entries are summed") {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real general\n"
      "1 1 2\n"
      "1 1 1.5\n"
      "1 1 2.5\n");
  REQUIRE(read_matrix_market(in).to_dense()(0, 0) == 4.0);
}

TEST_CASE("parse errors carry line numbers") {
  auto message_of = [](const std::string& content) {
    std::istringstream in(content);
    try {
      read_matrix_market(in);
    } catch (const ParseError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  std::string header_msg = message_of(
      "%%MatrixMarket matrix coordinate complex general\n1 1 0\n");
  REQUIRE(header_msg.find("line 1") != std::string::npos);
  std::string range_msg = message_of(
      "%%MatrixMarket matrix coordinate real general\n"
      "2 2 1\n"
      "3 1 1.0\n");
  REQUIRE(range_msg.find("line") != std::string::npos);
  REQUIRE(!range_msg.empty());
}

TEST_CASE("write/read round trip") {
  CounterRng rng(5);
  std::vector<std::tuple<Index, Index, double>> trips;
  for (int t = 0; t < 60; ++t)
    trips.emplace_back(static_cast<Index>(rng.next_below(12)),
                       static_cast<Index>(rng.next_below(12)),
                       rng.next_gaussian());
  CsrMatrix a = CsrMatrix::from_triplets(12, 12, trips);
  std::ostringstream out;
  write_matrix_market(out, a);
  std::istringstream in(out.str());
  CsrMatrix b = read_matrix_market(in);
  REQUIRE(a.row_ptr == b.row_ptr);
  REQUIRE(a.col_idx == b.col_idx);
  REQUIRE(a.values == b.values);
}

TEST_CASE("shift matrix maps e_j to e_{j+1}") {
  CsrMatrix a = shift_matrix(4);
  REQUIRE(a.values.size() == 3);
  Vector e1 = Vector::Zero(4);
  e1[0] = 1.0;
  Vector y = spmv(a, e1);
  REQUIRE(y[1] == 1.0);
  REQUIRE(y.norm() == 1.0);
}

TEST_CASE("conv_diff_2d with zero peclet is symmetric") {
  CsrMatrix a = conv_diff_2d(4, 0.0);
  Matrix d = a.to_dense();
  REQUIRE(a.nrows == 16);
  REQUIRE((d - d.transpose()).norm() == 0.0);
  REQUIRE(d(0, 0) == 4.0);
  CsrMatrix b = conv_diff_2d(4, 50.0);
  Matrix db = b.to_dense();
  REQUIRE((db - db.transpose()).norm() > 0.1);
}

TEST_CASE("tridiagonal Toeplitz eigenvalues match the closed form") {
  const Index n = 12;
  const double a = 2.0, b = -1.0, c = -1.0;
  Matrix d = tridiag_toeplitz(n, a, b, c).to_dense();
  Eigen::EigenSolver<Matrix> es(d);
  std::vector<double> eig;
  for (Index i = 0; i < n; ++i) eig.push_back(es.eigenvalues()[i].real());
  std::sort(eig.begin(), eig.end());
  std::vector<double> closed;
  for (Index j = 1; j <= n; ++j)
    closed.push_back(a + 2.0 * std::sqrt(b * c) *
                             std::cos(std::numbers::pi * j / (n + 1)));
  std::sort(closed.begin(), closed.end());
  for (Index i = 0; i < n; ++i)
    REQUIRE(eig[static_cast<std::size_t>(i)] ==
            test_helpers::Approx(closed[static_cast<std::size_t>(i)]).margin(1e-10));
}

TEST_CASE("generator specs parse and are deterministic") {
  CsrMatrix a = generate("dense_random_spectrum:20,100,7");
  CsrMatrix b = generate("dense_random_spectrum:20,100,7");
  REQUIRE(a.values == b.values);
  REQUIRE(cond2(a.to_dense()) == test_helpers::Approx(100.0).epsilon(1e-8));
  REQUIRE_THROWS_AS(generate("no_such_generator:1"), std::invalid_argument);
}

TEST_CASE("right-hand side kinds") {
  Vector e1 = make_rhs(RhsKind::e1, 4, 0);
  REQUIRE(e1[0] == 1.0);
  REQUIRE(e1.tail(3).norm() == 0.0);
  Vector pert = make_rhs(RhsKind::e1_perturbed, 4, 0);
  REQUIRE(pert[0] == test_helpers::Approx(1.0).margin(1e-14));
  REQUIRE(pert[3] == 1e-15);
  REQUIRE(make_rhs(RhsKind::ones, 3, 0).sum() == 3.0);
  Vector g1 = make_rhs(RhsKind::gaussian, 8, 5);
  Vector g2 = make_rhs(RhsKind::gaussian, 8, 5);
  REQUIRE((g1 - g2).norm() == 0.0);
  REQUIRE_THROWS_AS(parse_rhs("bogus"), std::invalid_argument);
}
