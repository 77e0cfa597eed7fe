#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ska/linalg.hpp"
#include "ska/types.hpp"

namespace ska {

/// eta = ||(V^T V)^{-1/2} V^T v||, which equals the norm of the projection
/// of v onto range(V). Returns (eta, sqrt((1+eta)/(1-eta))), the factor
/// bounding cond([V, v]) / cond(V); +inf when eta >= 1.
inline std::pair<double, double> eta_bound(const Matrix& v,
                                           const Vector& vnew) {
  Eigen::JacobiSVD<Matrix> svd(v, Eigen::ComputeThinU);
  double eta = (svd.matrixU().transpose() * vnew).norm();
  double factor = (eta < 1.0)
                      ? std::sqrt((1.0 + eta) / (1.0 - eta))
                      : std::numeric_limits<double>::infinity();
  return {eta, factor};
}

/// Lower bound on sigma_min([V, v])^2 given sigma_min(V) and alpha=||V^T v||:
/// (1 + smin^2 - sqrt((1 - smin^2)^2 + 4 alpha^2)) / 2.
inline double sigma_min_lower_bound(double sigma_min, double alpha) {
  if (!(sigma_min > 0.0 && sigma_min <= 1.0))
    throw std::domain_error("sigma_min_lower_bound: need 0 < sigma_min <= 1");
  if (!(alpha >= 0.0 && alpha < sigma_min))
    throw std::domain_error("sigma_min_lower_bound: need 0 <= alpha < sigma_min");
  double l = sigma_min * sigma_min;
  return 0.5 * (1.0 + l - std::sqrt((1.0 - l) * (1.0 - l) + 4.0 * alpha * alpha));
}

/// Upper bound on cond([V, v])^2.
inline double cond_upper_bound(double sigma_min, double sigma_max,
                               double alpha) {
  double denom = 2.0 * sigma_min_lower_bound(sigma_min, alpha);
  double lmax = sigma_max * sigma_max;
  double numer =
      1.0 + lmax + std::sqrt((lmax - 1.0) * (lmax - 1.0) + 4.0 * alpha * alpha);
  return numer / denom;
}

/// Lower bound on cond([V, v])^2 for the v attaining the sigma_min bound.
inline double attainable_cond_lower_bound(double sigma_min, double alpha) {
  return 1.0 / sigma_min_lower_bound(sigma_min, alpha);
}

/// Unit vector v with ||V^T v|| = alpha aligned against the smallest
/// eigenvector of V^T V, padded in the orthogonal complement; the extended
/// matrix [V, v] attains the sigma_min lower bound exactly.
inline Vector adversarial_next_vector(const Matrix& v, double alpha) {
  const Index n = v.rows();
  const Index m = v.cols();
  if (n <= m)
    throw std::invalid_argument(
        "adversarial_next_vector: no room in the orthogonal complement");
  Eigen::JacobiSVD<Matrix> svd(v, Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  double smin = s[m - 1];
  if (!(alpha >= 0.0 && alpha < smin))
    throw std::domain_error("adversarial_next_vector: need alpha < sigma_min");
  Vector x = svd.matrixV().col(m - 1);  // unit eigenvector for lambda_min
  double lmin = smin * smin;
  Vector c = (-alpha / lmin) * x;       // solves (V^T V) c = -alpha x
  Vector in_range = v * c;
  double in_norm_sq = alpha * alpha / lmin;
  if (in_norm_sq > 1.0)
    throw std::domain_error("adversarial_next_vector: in-range part too large");
  // First direction of an orthonormal complement basis.
  Eigen::HouseholderQR<Matrix> qr(v);
  Matrix qfull = qr.householderQ() * Matrix::Identity(n, m + 1);
  Vector z = qfull.col(m);
  return in_range + std::sqrt(1.0 - in_norm_sq) * z;
}

/// Everything the theorems of the condition-growth analysis evaluate on one
/// (V, v) pair.
struct BoundReport {
  double sigma_min_v = 0.0;
  double sigma_max_v = 0.0;
  double alpha = 0.0;  // ||V^T v||
  double eta = 0.0;
  double lower_bound_sigma_min_sq = 0.0;
  double upper_bound_cond_sq = 0.0;
  double attainable_lower_cond_sq = 0.0;
  double measured_cond_sq = 0.0;
  double measured_sigma_min_sq = 0.0;
};

inline BoundReport evaluate_bounds(const Matrix& v, const Vector& vnew) {
  BoundReport rep;
  Vector s = singular_values(v);
  rep.sigma_min_v = s[s.size() - 1];
  rep.sigma_max_v = s[0];
  rep.alpha = (v.transpose() * vnew).norm();
  rep.eta = eta_bound(v, vnew).first;
  rep.lower_bound_sigma_min_sq = sigma_min_lower_bound(rep.sigma_min_v, rep.alpha);
  rep.upper_bound_cond_sq = cond_upper_bound(rep.sigma_min_v, rep.sigma_max_v, rep.alpha);
  rep.attainable_lower_cond_sq = attainable_cond_lower_bound(rep.sigma_min_v, rep.alpha);
  Matrix ext(v.rows(), v.cols() + 1);
  ext << v, vnew;
  Vector se = singular_values(ext);
  double c = se[0] / se[se.size() - 1];
  rep.measured_cond_sq = c * c;
  rep.measured_sigma_min_sq = se[se.size() - 1] * se[se.size() - 1];
  return rep;
}

/// Scalar worst-case recurrence x_{m+1}^2 = (1 + x_m^2
/// - sqrt((1 - x_m^2)^2 + 4 a_m^2)) / 2 with a_m = alpha_rule(x_m).
/// Returns x_{m0}, ..., x_m.
inline std::vector<double> decay_recurrence(
    double x0, Index m0, Index m,
    const std::function<double(double)>& alpha_rule) {
  if (!(x0 > 0.0 && x0 <= 1.0))
    throw std::domain_error("decay_recurrence: need 0 < x0 <= 1");
  std::vector<double> series{x0};
  double x = x0;
  for (Index i = m0; i < m; ++i) {
    double a = alpha_rule(x);
    double xsq = x * x;
    double next_sq =
        0.5 * (1.0 + xsq - std::sqrt((1.0 - xsq) * (1.0 - xsq) + 4.0 * a * a));
    x = std::sqrt(std::max(next_sq, 0.0));
    series.push_back(x);
  }
  return series;
}

/// Projects w against column idx of V only; returns cond of the extended
/// matrix with the raw and with the normalized new column.
inline std::pair<double, double> cond_after_projection(const Matrix& v,
                                                       const Vector& w,
                                                       Index idx) {
  Vector vi = v.col(idx);
  Vector what = w - vi * (vi.dot(w) / vi.squaredNorm());
  Matrix ext(v.rows(), v.cols() + 1);
  ext << v, what;
  double unnormalized = cond2(ext);
  ext.col(v.cols()) = what / what.norm();
  return {unnormalized, cond2(ext)};
}

/// Loss-of-orthogonality metrics of G = [V, v]: {||I - G^T G||_2,
/// ||I - G^T G||_F, ||G^T G||_2, ||G^T G||_F}.
inline std::array<double, 4> orthogonality_metrics(const Matrix& g) {
  Matrix gram = g.transpose() * g;
  Matrix dev = Matrix::Identity(g.cols(), g.cols()) - gram;
  auto norm2 = [](const Matrix& m) { return singular_values(m)[0]; };
  return {norm2(dev), dev.norm(), norm2(gram), gram.norm()};
}

/// Dolan-More performance profile curves. Metric values are "larger is
/// better"; non-finite or non-positive entries mark failures, which never
/// contribute to the curve.
struct ProfileData {
  std::vector<std::string> methods;
  // One stepwise curve per method, sampled at every breakpoint theta.
  std::vector<std::vector<std::pair<double, double>>> curves;
};

inline ProfileData performance_profile(
    const std::vector<std::string>& methods,
    const Matrix& metric /* methods x problems */) {
  const Index nm = metric.rows();
  const Index np = metric.cols();
  ProfileData out;
  out.methods = methods;
  Matrix ratio(nm, np);
  for (Index p = 0; p < np; ++p) {
    double best = 0.0;
    for (Index m = 0; m < nm; ++m)
      if (std::isfinite(metric(m, p)) && metric(m, p) > best)
        best = metric(m, p);
    for (Index m = 0; m < nm; ++m)
      ratio(m, p) = (std::isfinite(metric(m, p)) && metric(m, p) > 0.0 &&
                     best > 0.0)
                        ? best / metric(m, p)
                        : std::numeric_limits<double>::infinity();
  }
  // Breakpoints: all finite ratios.
  std::vector<double> thetas{1.0};
  for (Index m = 0; m < nm; ++m)
    for (Index p = 0; p < np; ++p)
      if (std::isfinite(ratio(m, p))) thetas.push_back(ratio(m, p));
  std::sort(thetas.begin(), thetas.end());
  thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());
  for (Index m = 0; m < nm; ++m) {
    std::vector<std::pair<double, double>> curve;
    for (double theta : thetas) {
      Index count = 0;
      for (Index p = 0; p < np; ++p)
        if (ratio(m, p) <= theta) ++count;
      curve.emplace_back(theta,
                         static_cast<double>(count) / static_cast<double>(np));
    }
    out.curves.push_back(std::move(curve));
  }
  return out;
}

/// Histogram of log10(singular values); counts sum to ncols. Values at or
/// below zero land in the first bin.
struct Histogram {
  std::vector<double> edges;  // nbins + 1, in log10 space
  std::vector<Index> counts;
};

inline Histogram singular_value_histogram(const Matrix& v, Index nbins) {
  if (nbins < 1)
    throw std::invalid_argument("singular_value_histogram: nbins >= 1");
  Vector s = singular_values(v);
  std::vector<double> logs(static_cast<std::size_t>(s.size()));
  for (Index i = 0; i < s.size(); ++i)
    logs[static_cast<std::size_t>(i)] =
        (s[i] > 0.0) ? std::log10(s[i]) : -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double l : logs)
    if (std::isfinite(l)) {
      lo = std::min(lo, l);
      hi = std::max(hi, l);
    }
  if (!std::isfinite(lo)) {
    lo = -1.0;
    hi = 0.0;
  }
  if (hi - lo < 1e-12) hi = lo + 1e-12;
  Histogram h;
  h.counts.assign(static_cast<std::size_t>(nbins), 0);
  for (Index i = 0; i <= nbins; ++i)
    h.edges.push_back(lo + (hi - lo) * static_cast<double>(i) /
                               static_cast<double>(nbins));
  for (double l : logs) {
    Index bin = 0;
    if (std::isfinite(l)) {
      bin = static_cast<Index>((l - lo) / (hi - lo) *
                               static_cast<double>(nbins));
      bin = std::min(std::max<Index>(bin, 0), nbins - 1);
    }
    h.counts[static_cast<std::size_t>(bin)]++;
  }
  return h;
}

}  // namespace ska
