#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "ska/csr.hpp"
#include "ska/linalg.hpp"
#include "ska/selection.hpp"
#include "ska/sketch.hpp"
#include "ska/types.hpp"

namespace ska {

enum class ArnoldiMethod {
  full,
  truncated,
  truncated_sketched,
  sketched_orthonormal,
  sketch_select
};

inline const char* to_string(ArnoldiMethod m) {
  switch (m) {
    case ArnoldiMethod::full: return "full";
    case ArnoldiMethod::truncated: return "truncated";
    case ArnoldiMethod::truncated_sketched: return "truncated-sketched";
    case ArnoldiMethod::sketched_orthonormal: return "sketched-orth";
    case ArnoldiMethod::sketch_select: return "sketch-select";
  }
  return "?";
}

enum class StopReason { none, reached_m_max, breakdown, cond_exceeded };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::none: return "none";
    case StopReason::reached_m_max: return "m-max";
    case StopReason::breakdown: return "breakdown";
    case StopReason::cond_exceeded: return "cond-exceeded";
  }
  return "?";
}

struct ArnoldiConfig {
  Index m_max = 100;
  Index k = 2;
  double cond_threshold = 1e12;
  Index cond_check_stride = 5;
  double breakdown_tol = 1e-14;
  ArnoldiMethod method = ArnoldiMethod::full;
  SelectStrategy strategy = SelectStrategy::pinv;

  bool sketched() const { return method != ArnoldiMethod::full &&
                                 method != ArnoldiMethod::truncated; }

  void validate() const {
    if (m_max < 1 || k < 1)
      throw std::invalid_argument("ArnoldiConfig: m_max and k must be >= 1");
    if (cond_threshold <= 1.0)
      throw std::invalid_argument("ArnoldiConfig: cond_threshold must be > 1");
    if (cond_check_stride < 1)
      throw std::invalid_argument("ArnoldiConfig: cond_check_stride must be >= 1");
  }
};

/// Incremental Krylov basis construction. After j completed steps the basis
/// has j+1 columns; h is (j+1) x j. When a sketch is supplied, the sketched
/// basis SV and the sketched images SAV (sketches of A v_i taken before any
/// projection) are maintained alongside.
class ArnoldiProcess {
 public:
  ArnoldiProcess(const CsrMatrix& a, const Vector& b, ArnoldiConfig cfg,
                 const SketchOperator* sketch = nullptr)
      : a_(a), cfg_(cfg), sketch_(sketch) {
    cfg_.validate();
    if (a.nrows != a.ncols)
      throw std::invalid_argument("ArnoldiProcess: matrix must be square");
    if (b.size() != a.ncols)
      throw std::invalid_argument("ArnoldiProcess: b length mismatch");
    if (b.norm() == 0.0)
      throw std::invalid_argument("ArnoldiProcess: b must be nonzero");
    if (cfg_.sketched() && sketch_ == nullptr)
      throw std::invalid_argument("ArnoldiProcess: method requires a sketch");
    if (sketch_ != nullptr && sketch_->cols() != a.ncols)
      throw std::invalid_argument("ArnoldiProcess: sketch dimension mismatch");
    const Index n = a.nrows;
    const Index cap = cfg_.m_max + 1;
    v_.resize(n, cap);
    h_ = Matrix::Zero(cap, cfg_.m_max);
    if (sketch_ != nullptr) {
      sv_.resize(sketch_->rows(), cap);
      sav_.resize(sketch_->rows(), cfg_.m_max);
      Vector sb = sketch_->apply(b);
      if (normalize_sketched()) {
        double nsb = sb.norm();
        if (nsb == 0.0) throw std::invalid_argument("ArnoldiProcess: Sb = 0");
        v_.col(0) = b / nsb;
        sv_.col(0) = sb / nsb;
      } else {
        double nb = b.norm();
        v_.col(0) = b / nb;
        sv_.col(0) = sb / nb;
      }
    } else {
      v_.col(0) = b / b.norm();
    }
  }

  Index iters() const { return j_; }
  StopReason stop_reason() const { return stop_; }
  bool stopped() const { return stop_ != StopReason::none; }

  /// Basis columns built so far (j+1 of them).
  auto basis() const { return v_.leftCols(j_ + 1); }
  auto sketched_basis() const { return sv_.leftCols(j_ + 1); }
  auto sketched_images() const { return sav_.leftCols(j_); }
  auto coefficients() const { return h_.topLeftCorner(j_ + 1, j_); }

  /// Full preallocated H; on breakdown at step j the partially filled
  /// column j (with near-zero subdiagonal) is available here.
  const Matrix& h_raw() const { return h_; }

  /// Full preallocated SAV; column j is valid even when step j broke down.
  const Matrix& sketched_images_raw() const { return sav_; }

  double basis_cond() const { return cond2(v_.leftCols(j_ + 1)); }

  /// Runs one iteration; returns false once the process has stopped.
  bool step() {
    if (stopped()) return false;
    if (j_ >= cfg_.m_max) {
      stop_ = StopReason::reached_m_max;
      return false;
    }
    const Index j = j_;
    Vector w = spmv(a_, v_.col(j));
    Vector sw;
    if (sketch_ != nullptr) {
      sw = sketch_->apply(w);
      sav_.col(j) = sw;
    }
    switch (cfg_.method) {
      case ArnoldiMethod::full: full_step(j, w, sw); break;
      case ArnoldiMethod::truncated:
        truncated_step(j, w, sw, /*sketched_coeffs=*/false);
        break;
      case ArnoldiMethod::truncated_sketched:
        truncated_step(j, w, sw, /*sketched_coeffs=*/true);
        break;
      case ArnoldiMethod::sketched_orthonormal:
        // Full-width sketched projection: sketch-select with k = j.
        sketch_select_step(j, w, sw, SelectStrategy::pinv, j + 1);
        break;
      case ArnoldiMethod::sketch_select:
        sketch_select_step(j, w, sw, cfg_.strategy, cfg_.k);
        break;
    }
    if (stop_ == StopReason::breakdown) return false;
    ++j_;
    if (j_ >= cfg_.m_max) {
      stop_ = StopReason::reached_m_max;
    } else if (j_ % cfg_.cond_check_stride == 0 &&
               std::isfinite(cfg_.cond_threshold)) {
      last_cond_ = basis_cond();
      if (last_cond_ > cfg_.cond_threshold) stop_ = StopReason::cond_exceeded;
    }
    return !stopped();
  }

  double last_cond_check() const { return last_cond_; }

 private:
  bool normalize_sketched() const { return cfg_.sketched(); }

  void commit(Index j, const Vector& vnew, const Vector& svnew, double hsub) {
    h_(j + 1, j) = hsub;
    v_.col(j + 1) = vnew;
    if (sketch_ != nullptr) sv_.col(j + 1) = svnew;
  }

  void full_step(Index j, Vector& w, Vector& sw) {
    const double wnorm = w.norm();
    for (Index i = 0; i <= j; ++i) {
      double hij = v_.col(i).dot(w);
      w -= hij * v_.col(i);
      h_(i, j) += hij;
    }
    // One reorthogonalization pass when significant cancellation occurred.
    if (w.norm() < 0.7071 * wnorm) {
      for (Index i = 0; i <= j; ++i) {
        double hij = v_.col(i).dot(w);
        w -= hij * v_.col(i);
        h_(i, j) += hij;
      }
    }
    double hsub = w.norm();
    if (hsub <= cfg_.breakdown_tol * wnorm) {
      h_(j + 1, j) = hsub;
      stop_ = StopReason::breakdown;
      return;
    }
    Vector svnew;
    if (sketch_ != nullptr) svnew = sketch_->apply(Vector(w / hsub));
    commit(j, w / hsub, svnew, hsub);
  }

  void truncated_step(Index j, Vector& w, Vector& sw, bool sketched_coeffs) {
    const Index i0 = std::max<Index>(0, j + 1 - cfg_.k);
    const double wnorm = sketched_coeffs ? sw.norm() : w.norm();
    // Classical coefficients: all inner products taken against the
    // unmodified w (resp. Sw).
    Vector coeffs(j + 1 - i0);
    for (Index i = i0; i <= j; ++i)
      coeffs[i - i0] = sketched_coeffs ? sv_.col(i).dot(sw) : v_.col(i).dot(w);
    for (Index i = i0; i <= j; ++i) {
      w -= coeffs[i - i0] * v_.col(i);
      if (sketch_ != nullptr) sw -= coeffs[i - i0] * sv_.col(i);
      h_(i, j) = coeffs[i - i0];
    }
    double hsub = sketched_coeffs ? sw.norm() : w.norm();
    if (hsub <= cfg_.breakdown_tol * wnorm) {
      h_(j + 1, j) = hsub;
      stop_ = StopReason::breakdown;
      return;
    }
    Vector svnew;
    if (sketch_ != nullptr) svnew = sw / hsub;
    commit(j, w / hsub, svnew, hsub);
  }

  void sketch_select_step(Index j, Vector& w, Vector& sw,
                          SelectStrategy strategy, Index k) {
    const double swnorm = sw.norm();
    SelectionResult sel = select(strategy, sv_.leftCols(j + 1), sw, k);
    if (sel.indices.empty())
      throw std::runtime_error("sketch_select_step: empty selection");
    // Two synchronized subtractions keep SV consistent with S applied to V.
    for (std::size_t i = 0; i < sel.indices.size(); ++i) {
      const Index idx = sel.indices[i];
      const double c = sel.coeffs[static_cast<Index>(i)];
      w -= c * v_.col(idx);
      sw -= c * sv_.col(idx);
      h_(idx, j) = c;
    }
    double hsub = sw.norm();
    if (hsub <= cfg_.breakdown_tol * swnorm) {
      h_(j + 1, j) = hsub;
      stop_ = StopReason::breakdown;
      return;
    }
    commit(j, w / hsub, sw / hsub, hsub);
  }

  const CsrMatrix& a_;
  ArnoldiConfig cfg_;
  const SketchOperator* sketch_;
  Matrix v_, sv_, sav_, h_;
  Index j_ = 0;
  StopReason stop_ = StopReason::none;
  double last_cond_ = 1.0;
};

/// Snapshot of a finished run.
struct ArnoldiResult {
  Matrix v;
  Matrix sv;
  Matrix sav;
  Matrix h;
  Index iters = 0;
  StopReason stop = StopReason::none;
};

inline ArnoldiResult arnoldi_run(const CsrMatrix& a, const Vector& b,
                                 const ArnoldiConfig& cfg,
                                 const SketchOperator* sketch = nullptr) {
  ArnoldiProcess proc(a, b, cfg, sketch);
  while (proc.step()) {
  }
  ArnoldiResult res;
  res.v = proc.basis();
  if (sketch != nullptr) {
    res.sv = proc.sketched_basis();
    res.sav = proc.sketched_images();
  }
  res.h = proc.coefficients();
  res.iters = proc.iters();
  res.stop = proc.stop_reason();
  return res;
}

}  // namespace ska
