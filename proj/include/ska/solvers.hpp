#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "ska/arnoldi.hpp"
#include "ska/csr.hpp"
#include "ska/linalg.hpp"
#include "ska/types.hpp"

namespace ska {

enum class SolveStop { converged, reached_m_max, breakdown, cond_exceeded };

inline const char* to_string(SolveStop s) {
  switch (s) {
    case SolveStop::converged: return "converged";
    case SolveStop::reached_m_max: return "m-max";
    case SolveStop::breakdown: return "breakdown";
    case SolveStop::cond_exceeded: return "cond-exceeded";
  }
  return "?";
}

/// Per-iteration and per-checkpoint series from one linear solve.
struct SolveReport {
  std::vector<Index> iter;              // basis dimension j, every iteration
  std::vector<double> sketched_resid;   // ||S(AVy - b)||, every iteration (sGMRES)
  std::vector<double> resid_estimate;   // GMRES recurrence residual, every iteration
  std::vector<Index> checkpoint_iter;
  std::vector<double> true_resid;       // ||Ax - b|| at checkpoints
  std::vector<double> basis_cond;       // cond of V at checkpoints
  Vector x;
  SolveStop stop = SolveStop::reached_m_max;
  bool rank_deficient_fallback = false;
};

/// Classical GMRES on a fully orthogonalized Arnoldi basis. The Hessenberg
/// least-squares problem is updated with Givens rotations, so the residual
/// estimate is available at every iteration for free.
inline SolveReport gmres(const CsrMatrix& a, const Vector& b, Index m_max,
                         double tol) {
  ArnoldiConfig cfg;
  cfg.method = ArnoldiMethod::full;
  cfg.m_max = m_max;
  cfg.cond_threshold = std::numeric_limits<double>::infinity();
  ArnoldiProcess proc(a, b, cfg);

  const double beta = b.norm();
  SolveReport rep;
  Matrix r = Matrix::Zero(m_max + 1, m_max);  // rotated Hessenberg
  Vector g = Vector::Zero(m_max + 1);         // rotated beta*e1
  g[0] = beta;
  std::vector<double> cs, sn;
  Index j = 0;
  bool broke_down = false;
  while (j < m_max) {
    const Index prev = proc.iters();
    proc.step();
    broke_down = proc.stop_reason() == StopReason::breakdown;
    if (proc.iters() == prev && !broke_down) break;
    // New Hessenberg column j (on breakdown it is the partial column).
    r.col(j).head(j + 2) = proc.h_raw().col(j).head(j + 2);
    for (Index i = 0; i < j; ++i) {
      double t = cs[i] * r(i, j) + sn[i] * r(i + 1, j);
      r(i + 1, j) = -sn[i] * r(i, j) + cs[i] * r(i + 1, j);
      r(i, j) = t;
    }
    double denom = std::hypot(r(j, j), r(j + 1, j));
    double c = (denom == 0.0) ? 1.0 : r(j, j) / denom;
    double s = (denom == 0.0) ? 0.0 : r(j + 1, j) / denom;
    cs.push_back(c);
    sn.push_back(s);
    r(j, j) = denom;
    r(j + 1, j) = 0.0;
    double t = c * g[j] + s * g[j + 1];
    g[j + 1] = -s * g[j] + c * g[j + 1];
    g[j] = t;
    ++j;
    double resid = std::abs(g[j]);
    rep.iter.push_back(j);
    rep.resid_estimate.push_back(resid);
    if (resid / beta <= tol || broke_down) break;
  }
  // Back-substitute for y and recover x; on breakdown the basis has only
  // j columns even though column j-1 of H was formed.
  Vector y = r.topLeftCorner(j, j)
                 .template triangularView<Eigen::Upper>()
                 .solve(g.head(j));
  const Index basis_cols = std::min<Index>(j, proc.iters() + 1);
  rep.x = proc.basis().leftCols(basis_cols) * y.head(basis_cols);
  double final_resid = (spmv(a, rep.x) - b).norm();
  rep.checkpoint_iter.push_back(j);
  rep.true_resid.push_back(final_resid);
  rep.basis_cond.push_back(cond2(proc.basis()));
  // A breakdown with a small residual is a lucky one: the solution is exact
  // within the invariant subspace, so report convergence.
  if (!rep.resid_estimate.empty() &&
      rep.resid_estimate.back() / beta <= tol)
    rep.stop = SolveStop::converged;
  else if (broke_down)
    rep.stop = SolveStop::breakdown;
  else
    rep.stop = SolveStop::reached_m_max;
  return rep;
}

/// Sketched GMRES: minimizes ||S(A V y - b)|| over the basis produced by any
/// constructor in cfg. The QR of SAV grows one column per iteration, so the
/// sketched residual costs O(s j) per iteration; true residuals and basis
/// condition numbers are computed at checkpoints only.
inline SolveReport sgmres(const CsrMatrix& a, const Vector& b,
                          ArnoldiConfig cfg, const SketchOperator& sketch,
                          double tol, Index true_resid_stride = 10,
                          bool ignore_cond = false) {
  if (ignore_cond)
    cfg.cond_threshold = std::numeric_limits<double>::infinity();
  ArnoldiProcess proc(a, b, cfg, &sketch);
  const Vector sb = sketch.apply(b);
  const double sbeta = sb.norm();
  QrUpdatable qr(sketch.rows());
  SolveReport rep;

  auto checkpoint = [&](Index j) {
    Vector y = qr.solve(sb);
    Vector x = proc.basis().leftCols(j) * y;
    rep.checkpoint_iter.push_back(j);
    rep.true_resid.push_back((spmv(a, x) - b).norm());
    rep.basis_cond.push_back(cond2(proc.basis().leftCols(j + 1)));
    return x;
  };

  Index j = 0;
  bool converged = false;
  while (!proc.stopped()) {
    const Index prev = proc.iters();
    proc.step();
    const bool broke_down = proc.stop_reason() == StopReason::breakdown;
    if (proc.iters() == prev && !broke_down) break;
    // Column prev of SAV exists even on breakdown.
    qr.append_column(proc.sketched_images_raw().col(prev));
    j = prev + 1;
    double sresid = qr.residual_norm(sb);
    rep.iter.push_back(j);
    rep.sketched_resid.push_back(sresid);
    if (sresid / sbeta <= tol) converged = true;
    if (converged || broke_down || proc.stopped()) break;
    if (j % true_resid_stride == 0) checkpoint(j);
  }
  // Final solve. A numerically rank-deficient SAV gets a minimum-norm
  // least-squares fallback.
  const double rank_tol = static_cast<double>(sketch.rows()) *
                          std::numeric_limits<double>::epsilon() *
                          qr.r().diagonal().maxCoeff();
  Vector y;
  if (qr.min_diag() <= rank_tol) {
    rep.rank_deficient_fallback = true;
    y = least_squares(proc.sketched_images_raw().leftCols(j), sb);
  } else {
    y = qr.solve(sb);
  }
  rep.x = proc.basis().leftCols(j) * y;
  rep.checkpoint_iter.push_back(j);
  rep.true_resid.push_back((spmv(a, rep.x) - b).norm());
  rep.basis_cond.push_back(cond2(proc.basis()));
  if (converged)
    rep.stop = SolveStop::converged;
  else if (proc.stop_reason() == StopReason::breakdown)
    rep.stop = SolveStop::breakdown;
  else if (proc.stop_reason() == StopReason::cond_exceeded)
    rep.stop = SolveStop::cond_exceeded;
  else
    rep.stop = SolveStop::reached_m_max;
  return rep;
}

}  // namespace ska
