#include <doctest.h>

TEST_SUITE_BEGIN("analysis");

#include <cmath>

#include "helpers.hpp"
#include "ska/analysis.hpp"

using namespace ska;
using test_helpers::rand_matrix;
using test_helpers::rand_orthonormal;
using test_helpers::rand_unit_columns;
using test_helpers::rand_vector;

namespace {

/// Random unit vector whose in-range coupling alpha = ||V^T v|| stays below
/// sigma_min(V), shrinking the in-range part until the hypothesis holds.
Vector coupled_unit_vector(const Matrix& v, std::uint64_t seed) {
  Vector g = rand_vector(v.rows(), seed);
  Vector in_range = v * least_squares(v, g);
  Vector perp = (g - in_range).normalized();
  Vector dir = in_range.norm() > 0 ? Vector(in_range.normalized())
                                   : rand_vector(v.rows(), seed + 1).normalized();
  double smin = singular_values(v).minCoeff();
  for (double c = 0.4; ; c *= 0.5) {
    Vector cand = (std::sqrt(1.0 - c * c) * perp + c * dir).normalized();
    if ((v.transpose() * cand).norm() < 0.999 * smin) return cand;
  }
}

}  // namespace

TEST_CASE("eta bound basics") {
  Matrix v = rand_orthonormal(20, 4, 1);
  Vector g = rand_vector(20, 2);
  Vector perp = (g - v * (v.transpose() * g)).normalized();
  auto [eta0, f0] = eta_bound(v, perp);
  REQUIRE(eta0 <= 1e-12);
  REQUIRE(f0 == test_helpers::Approx(1.0).margin(1e-12));

  Matrix e1 = Matrix::Zero(3, 1);
  e1(0, 0) = 1.0;
  Vector vnew(3);
  vnew << 0.5, std::sqrt(0.75), 0.0;  // unit, with e1.vnew = 0.5
  auto [eta, f] = eta_bound(e1, vnew);
  REQUIRE(eta == test_helpers::Approx(0.5).epsilon(1e-12));
  REQUIRE(f == test_helpers::Approx(std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("eta bound controls measured condition growth") {
  for (int seed = 0; seed < 50; ++seed) {
    Matrix v = rand_unit_columns(30, 6, 100 + seed);
    Vector vnew = rand_vector(30, 500 + seed).normalized();
    auto [eta, f] = eta_bound(v, vnew);
    if (eta >= 1.0) continue;
    Matrix ext(30, 7);
    ext << v, vnew;
    REQUIRE(cond2(ext) <= f * cond2(v) * (1.0 + 1e-10));
  }
}

TEST_CASE("sigma_min lower bound formula and domain") {
  REQUIRE(sigma_min_lower_bound(0.8, 0.0) == test_helpers::Approx(0.64).epsilon(1e-14));
  REQUIRE(sigma_min_lower_bound(1.0, 1e-12) == test_helpers::Approx(1.0).margin(1e-10));
  REQUIRE_THROWS_AS(sigma_min_lower_bound(0.5, 0.5), std::domain_error);
  REQUIRE_THROWS_AS(sigma_min_lower_bound(0.0, 0.0), std::domain_error);
  REQUIRE_THROWS_AS(sigma_min_lower_bound(1.5, 0.1), std::domain_error);
}

TEST_CASE("cond upper bound equals an independent evaluation") {
  REQUIRE(cond_upper_bound(1.0, 1.0, 0.0) == test_helpers::Approx(1.0).epsilon(1e-14));
  for (int t = 0; t < 20; ++t) {
    double smin = 0.2 + 0.04 * t;
    double smax = 1.0 + 0.1 * t;
    double alpha = 0.5 * smin;
    // Re-derive from the two eigenvalue roots instead of the packaged form.
    double lmin = smin * smin, lmax = smax * smax;
    double lam_hi =
        0.5 * (1.0 + lmax + std::hypot(lmax - 1.0, 2.0 * alpha));
    double lam_lo =
        0.5 * (1.0 + lmin - std::hypot(1.0 - lmin, 2.0 * alpha));
    REQUIRE(cond_upper_bound(smin, smax, alpha) ==
            test_helpers::Approx(lam_hi / lam_lo).epsilon(1e-12));
    REQUIRE(attainable_cond_lower_bound(smin, alpha) ==
            test_helpers::Approx(1.0 / lam_lo).epsilon(1e-12));
  }
}

TEST_CASE("bound sandwich holds on random trials") {
  for (int seed = 0; seed < 200; ++seed) {
    Matrix v = rand_unit_columns(24, 5, 2000 + seed);
    Vector vnew = coupled_unit_vector(v, 3000 + seed);
    BoundReport rep = evaluate_bounds(v, vnew);
    REQUIRE(rep.measured_sigma_min_sq >= rep.lower_bound_sigma_min_sq - 1e-10);
    REQUIRE(rep.measured_cond_sq <= rep.upper_bound_cond_sq + 1e-10);
  }
}

TEST_CASE("adversarial vector hand case: V = e1 in R^3, alpha = 0.3") {
  Matrix v = Matrix::Zero(3, 1);
  v(0, 0) = 1.0;
  Vector vnew = adversarial_next_vector(v, 0.3);
  REQUIRE(vnew.norm() == test_helpers::Approx(1.0).epsilon(1e-13));
  Matrix ext(3, 2);
  ext << v, vnew;
  Vector s = singular_values(ext);
  double smin_sq = s[1] * s[1];
  REQUIRE(smin_sq == test_helpers::Approx((2.0 - std::sqrt(0.36)) / 2.0)
                         .epsilon(1e-12));
}

TEST_CASE("adversarial vector attains the bound") {
  for (int seed = 0; seed < 100; ++seed) {
    Matrix v = rand_unit_columns(40, 8, 4000 + seed);
    double smin = singular_values(v).minCoeff();
    double alpha = 0.5 * smin;
    Vector vnew = adversarial_next_vector(v, alpha);
    REQUIRE(vnew.norm() == test_helpers::Approx(1.0).epsilon(1e-12));
    Matrix ext(40, 9);
    ext << v, vnew;
    Vector s = singular_values(ext);
    REQUIRE(s[8] * s[8] ==
            test_helpers::Approx(sigma_min_lower_bound(smin, alpha)).margin(1e-10));
  }
  // alpha -> 0: the new vector is orthogonal to the range.
  Matrix v = rand_unit_columns(20, 4, 9001);
  Vector vnew = adversarial_next_vector(v, 0.0);
  REQUIRE((v.transpose() * vnew).norm() <= 1e-12);
}

TEST_CASE("decay recurrence constants") {
  auto flat = decay_recurrence(0.5, 0, 10, [](double) { return 0.0; });
  for (double x : flat) REQUIRE(x == test_helpers::Approx(0.5).epsilon(1e-14));

  double x0 = 1.0 / std::sqrt(2.0);
  auto series = decay_recurrence(x0, 0, 20, [](double x) { return 0.5 * x; });
  REQUIRE(series.back() <= std::pow(7.0 / 8.0, 10.0) * x0);
  for (std::size_t i = 0; i < series.size(); ++i)
    REQUIRE(series[i] <= std::pow(7.0 / 8.0, 0.5 * i) * x0 + 1e-14);
}

TEST_CASE("cond_after_projection fixture and tie case") {
  Matrix v(4, 3);
  v << 1, 0, 0, 2, 2, 0, 0, 1, 1, 0, 0, 2;
  v /= std::sqrt(5.0);
  Vector w(4);
  w << 8, 8, 9, 7;
  double best_u = std::numeric_limits<double>::infinity();
  double best_n = std::numeric_limits<double>::infinity();
  Index argmin_u = -1, argmin_n = -1;
  for (Index i = 0; i < 3; ++i) {
    auto [cu, cn] = cond_after_projection(v, w, i);
    if (cu < best_u) { best_u = cu; argmin_u = i; }
    if (cn < best_n) { best_n = cn; argmin_n = i; }
  }
  REQUIRE(argmin_u == 0);
  REQUIRE(argmin_n == 0);

  // w orthogonal to every column: all choices tie.
  Matrix q = rand_orthonormal(10, 3, 5);
  Vector g = rand_vector(10, 6);
  Vector wo = g - q * (q.transpose() * g);
  auto [u0, n0] = cond_after_projection(q, wo, 0);
  for (Index i = 1; i < 3; ++i) {
    auto [ui, ni] = cond_after_projection(q, wo, i);
    REQUIRE(ui == test_helpers::Approx(u0).epsilon(1e-10));
    REQUIRE(ni == test_helpers::Approx(n0).epsilon(1e-10));
  }
}

TEST_CASE("loss-of-orthogonality metrics minimized at column 2") {
  Matrix v(4, 3);
  v << 1, 0, 0, 2, 2, 0, 0, 1, 1, 0, 0, 2;
  v /= std::sqrt(5.0);
  Vector w(4);
  w << 9, 9, 10, 10;
  std::array<std::array<double, 4>, 3> vals{};
  for (Index i = 0; i < 3; ++i) {
    Vector vi = v.col(i);
    Vector what = w - vi * vi.dot(w);
    Matrix g(4, 4);
    g << v, what.normalized();
    vals[static_cast<std::size_t>(i)] = orthogonality_metrics(g);
  }
  for (std::size_t metric = 0; metric < 4; ++metric) {
    REQUIRE(vals[1][metric] < vals[0][metric]);
    REQUIRE(vals[1][metric] < vals[2][metric]);
  }
  // Spot value: the 2-norm deviation for the three choices.
  REQUIRE(vals[0][0] == test_helpers::Approx(1.075).margin(5e-3));
  REQUIRE(vals[1][0] == test_helpers::Approx(0.954).margin(5e-3));
  REQUIRE(vals[2][0] == test_helpers::Approx(1.626).margin(5e-3));
}

TEST_CASE("performance profile basics") {
  Matrix one(1, 3);
  one << 10, 20, 30;
  ProfileData p1 = performance_profile({"only"}, one);
  REQUIRE(p1.curves[0].front().first == 1.0);
  REQUIRE(p1.curves[0].front().second == 1.0);

  Matrix two(2, 1);
  two << 100, 50;
  ProfileData p2 = performance_profile({"a", "b"}, two);
  for (const auto& [theta, y] : p2.curves[1]) {
    if (theta < 2.0) REQUIRE(y == 0.0);
    if (theta >= 2.0) REQUIRE(y == 1.0);
  }
}

TEST_CASE("performance profile matches a hand-built table") {
  Matrix metric(3, 3);
  metric << 10, 8, 4,   // best on p0
            5, 8, 8,    // best on p1 (tie), p2
            10, 2, 8;   // tie on p0
  ProfileData p = performance_profile({"m0", "m1", "m2"}, metric);
  auto value_at = [&](std::size_t m, double theta) {
    double y = 0.0;
    for (const auto& [t, v] : p.curves[m])
      if (t <= theta + 1e-15) y = v;
    return y;
  };
  // Ratios: m0 -> {1, 1, 2}; m1 -> {2, 1, 1}; m2 -> {1, 4, 1}.
  REQUIRE(value_at(0, 1.0) == test_helpers::Approx(2.0 / 3.0));
  REQUIRE(value_at(0, 2.0) == test_helpers::Approx(1.0));
  REQUIRE(value_at(1, 1.0) == test_helpers::Approx(2.0 / 3.0));
  REQUIRE(value_at(1, 2.0) == test_helpers::Approx(1.0));
  REQUIRE(value_at(2, 1.0) == test_helpers::Approx(2.0 / 3.0));
  REQUIRE(value_at(2, 3.9) == test_helpers::Approx(2.0 / 3.0));
  REQUIRE(value_at(2, 4.0) == test_helpers::Approx(1.0));
  // Curves are non-decreasing step functions bounded by 1.
  for (const auto& curve : p.curves)
    for (std::size_t i = 1; i < curve.size(); ++i) {
      REQUIRE(curve[i].second >= curve[i - 1].second);
      REQUIRE(curve[i].second <= 1.0);
    }
}

TEST_CASE("failed runs never contribute to the profile") {
  Matrix metric(2, 2);
  metric << 10, 10, std::numeric_limits<double>::quiet_NaN(), 5;
  ProfileData p = performance_profile({"good", "flaky"}, metric);
  REQUIRE(p.curves[1].back().second == test_helpers::Approx(0.5));
  REQUIRE(p.curves[0].back().second == test_helpers::Approx(1.0));
}

TEST_CASE("singular value histogram") {
  Matrix q = rand_orthonormal(12, 5, 77);
  Histogram h1 = singular_value_histogram(q, 4);
  Index total = 0, nonzero_bins = 0;
  for (Index c : h1.counts) {
    total += c;
    if (c > 0) ++nonzero_bins;
  }
  REQUIRE(total == 5);
  REQUIRE(nonzero_bins == 1);

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 1e-8;
  Histogram h2 = singular_value_histogram(d, 4);
  REQUIRE(h2.counts.front() == 1);
  REQUIRE(h2.counts.back() == 1);

  // Direct bucketing oracle on a random matrix.
  Matrix m = rand_matrix(30, 10, 81);
  Histogram h3 = singular_value_histogram(m, 6);
  Vector s = singular_values(m);
  std::vector<Index> oracle(6, 0);
  for (Index i = 0; i < s.size(); ++i) {
    double l = std::log10(s[i]);
    std::size_t bin = 0;
    for (std::size_t e = 1; e + 1 < h3.edges.size(); ++e)
      if (l >= h3.edges[e]) bin = e;
    if (l >= h3.edges.back()) bin = 5;
    ++oracle[bin];
  }
  for (std::size_t i = 0; i < 6; ++i) REQUIRE(h3.counts[i] == oracle[i]);
}
