#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "ska/linalg.hpp"
#include "ska/types.hpp"

namespace ska {

/// One projection step's choice: which basis columns to project out and
/// with which coefficients. Indices are 0-based, sorted ascending.
struct SelectionResult {
  std::vector<Index> indices;
  Vector coeffs;
};

enum class SelectStrategy {
  pinv,
  pinv2,
  corr,
  corr_pinv,
  omp,
  sp,
  greedy,
  bruteforce
};

inline const char* to_string(SelectStrategy s) {
  switch (s) {
    case SelectStrategy::pinv: return "pinv";
    case SelectStrategy::pinv2: return "pinv2";
    case SelectStrategy::corr: return "corr";
    case SelectStrategy::corr_pinv: return "corr-pinv";
    case SelectStrategy::omp: return "omp";
    case SelectStrategy::sp: return "sp";
    case SelectStrategy::greedy: return "greedy";
    case SelectStrategy::bruteforce: return "bruteforce";
  }
  return "?";
}

inline SelectStrategy parse_strategy(const std::string& name) {
  if (name == "pinv") return SelectStrategy::pinv;
  if (name == "pinv2") return SelectStrategy::pinv2;
  if (name == "corr") return SelectStrategy::corr;
  if (name == "corr-pinv") return SelectStrategy::corr_pinv;
  if (name == "omp") return SelectStrategy::omp;
  if (name == "sp") return SelectStrategy::sp;
  if (name == "greedy") return SelectStrategy::greedy;
  if (name == "bruteforce") return SelectStrategy::bruteforce;
  throw std::invalid_argument("unknown selection strategy: " + name);
}

namespace detail {

/// Positions of the k largest |scores|; ties broken toward the lowest index.
inline std::vector<Index> top_k_abs(const Vector& scores, Index k) {
  std::vector<Index> idx(static_cast<std::size_t>(scores.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<Index>(i);
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
    return std::abs(scores[a]) > std::abs(scores[b]);
  });
  idx.resize(static_cast<std::size_t>(std::min<Index>(k, scores.size())));
  std::sort(idx.begin(), idx.end());
  return idx;
}

inline Matrix gather_columns(const Matrix& m, const std::vector<Index>& idx) {
  Matrix out(m.rows(), static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out.col(static_cast<Index>(i)) = m.col(idx[i]);
  return out;
}

inline Vector restricted_ls(const Matrix& sv, const std::vector<Index>& idx,
                            const Vector& sw) {
  return least_squares(gather_columns(sv, idx), sw);
}

inline double residual_norm(const Matrix& sv, const SelectionResult& sel,
                            const Vector& sw) {
  Vector r = sw;
  for (std::size_t i = 0; i < sel.indices.size(); ++i)
    r -= sel.coeffs[static_cast<Index>(i)] * sv.col(sel.indices[i]);
  return r.norm();
}

}  // namespace detail

inline SelectionResult select_pinv(const Matrix& sv, const Vector& sw,
                                   Index k) {
  Vector h = least_squares(sv, sw);
  SelectionResult res;
  res.indices = detail::top_k_abs(h, k);
  res.coeffs.resize(static_cast<Index>(res.indices.size()));
  for (std::size_t i = 0; i < res.indices.size(); ++i)
    res.coeffs[static_cast<Index>(i)] = h[res.indices[i]];
  return res;
}

inline SelectionResult select_pinv2(const Matrix& sv, const Vector& sw,
                                    Index k) {
  SelectionResult res = select_pinv(sv, sw, k);
  res.coeffs = detail::restricted_ls(sv, res.indices, sw);
  return res;
}

inline SelectionResult select_corr(const Matrix& sv, const Vector& sw,
                                   Index k) {
  Vector scores = sv.transpose() * sw;
  SelectionResult res;
  res.indices = detail::top_k_abs(scores, k);
  res.coeffs.resize(static_cast<Index>(res.indices.size()));
  for (std::size_t i = 0; i < res.indices.size(); ++i)
    res.coeffs[static_cast<Index>(i)] = scores[res.indices[i]];
  return res;
}

inline SelectionResult select_corr_pinv(const Matrix& sv, const Vector& sw,
                                        Index k) {
  SelectionResult res = select_corr(sv, sw, k);
  res.coeffs = detail::restricted_ls(sv, res.indices, sw);
  return res;
}

/// Orthogonal matching pursuit: k passes of residual correlation plus a
/// growing QR factorization of the selected columns.
inline SelectionResult select_omp(const Matrix& sv, const Vector& sw,
                                  Index k) {
  const Index j = sv.cols();
  const Index picks = std::min(k, j);
  std::vector<bool> used(static_cast<std::size_t>(j), false);
  std::vector<Index> chosen;
  QrUpdatable qr(sv.rows());
  Vector r = sw;
  for (Index t = 0; t < picks; ++t) {
    Index best = -1;
    double best_score = -1.0;
    for (Index i = 0; i < j; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      double score = std::abs(sv.col(i).dot(r));
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    chosen.push_back(best);
    qr.append_column(sv.col(best));
    Vector coeff = qr.solve(sw);
    r = sw;
    for (std::size_t i = 0; i < chosen.size(); ++i)
      r -= coeff[static_cast<Index>(i)] * sv.col(chosen[i]);
  }
  SelectionResult res;
  std::sort(chosen.begin(), chosen.end());
  res.indices = chosen;
  res.coeffs = detail::restricted_ls(sv, res.indices, sw);
  return res;
}

/// Subspace pursuit with a single outer iteration: correlation seed set,
/// residual expansion to <= 2k columns, prune back to k by coefficient
/// magnitude, final restricted least squares.
inline SelectionResult select_sp(const Matrix& sv, const Vector& sw,
                                 Index k) {
  const Index j = sv.cols();
  if (j <= k) {
    SelectionResult res;
    for (Index i = 0; i < j; ++i) res.indices.push_back(i);
    res.coeffs = least_squares(sv, sw);
    return res;
  }
  std::vector<Index> i0 = detail::top_k_abs(sv.transpose() * sw, k);
  Vector h0 = detail::restricted_ls(sv, i0, sw);
  Vector r = sw;
  for (std::size_t i = 0; i < i0.size(); ++i)
    r -= h0[static_cast<Index>(i)] * sv.col(i0[i]);
  Vector rscores = sv.transpose() * r;
  std::vector<Index> outside;
  for (Index i = 0; i < j; ++i)
    if (std::find(i0.begin(), i0.end(), i) == i0.end()) outside.push_back(i);
  Vector outside_scores(static_cast<Index>(outside.size()));
  for (std::size_t i = 0; i < outside.size(); ++i)
    outside_scores[static_cast<Index>(i)] = rscores[outside[i]];
  std::vector<Index> joint = i0;
  for (Index pos : detail::top_k_abs(outside_scores, k))
    joint.push_back(outside[static_cast<std::size_t>(pos)]);
  std::sort(joint.begin(), joint.end());
  Vector h1 = detail::restricted_ls(sv, joint, sw);
  std::vector<Index> keep = detail::top_k_abs(h1, k);
  SelectionResult res;
  for (Index pos : keep) res.indices.push_back(joint[static_cast<std::size_t>(pos)]);
  std::sort(res.indices.begin(), res.indices.end());
  res.coeffs = detail::restricted_ls(sv, res.indices, sw);
  return res;
}

/// Deflating greedy pick: each pass selects the column most correlated with
/// the residual (normalized), then removes that direction from the residual
/// and from all remaining working columns.
inline SelectionResult select_greedy(const Matrix& sv, const Vector& sw,
                                     Index k) {
  const Index j = sv.cols();
  const Index picks = std::min(k, j);
  Matrix work = sv;
  Vector r = sw;
  std::vector<bool> used(static_cast<std::size_t>(j), false);
  std::vector<Index> chosen;
  for (Index t = 0; t < picks; ++t) {
    Index best = -1;
    double best_score = -1.0;
    for (Index i = 0; i < j; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      double cn = work.col(i).norm();
      double score = (cn <= 1e-14) ? 0.0 : std::abs(work.col(i).dot(r)) / cn;
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    chosen.push_back(best);
    double cn = work.col(best).norm();
    if (cn > 1e-14) {
      Vector u = work.col(best) / cn;
      r -= u * u.dot(r);
      for (Index i = 0; i < j; ++i)
        if (!used[static_cast<std::size_t>(i)])
          work.col(i) -= u * u.dot(work.col(i));
    }
  }
  SelectionResult res;
  std::sort(chosen.begin(), chosen.end());
  res.indices = chosen;
  res.coeffs = detail::restricted_ls(sv, res.indices, sw);
  return res;
}

/// Exhaustive minimizer of the restricted least-squares residual over all
/// index sets of size k; test oracle for small j only. Ties resolve to the
/// lexicographically smallest set.
inline SelectionResult select_bruteforce(const Matrix& sv, const Vector& sw,
                                         Index k) {
  const Index j = sv.cols();
  const Index size = std::min(k, j);
  std::vector<Index> comb(static_cast<std::size_t>(size));
  for (Index i = 0; i < size; ++i) comb[static_cast<std::size_t>(i)] = i;
  SelectionResult best;
  double best_resid = std::numeric_limits<double>::infinity();
  while (true) {
    SelectionResult cand;
    cand.indices = comb;
    cand.coeffs = detail::restricted_ls(sv, cand.indices, sw);
    double resid = detail::residual_norm(sv, cand, sw);
    if (resid < best_resid) {
      best_resid = resid;
      best = cand;
    }
    // next combination in lexicographic order
    Index i = size - 1;
    while (i >= 0 && comb[static_cast<std::size_t>(i)] == j - size + i) --i;
    if (i < 0) break;
    ++comb[static_cast<std::size_t>(i)];
    for (Index l = i + 1; l < size; ++l)
      comb[static_cast<std::size_t>(l)] = comb[static_cast<std::size_t>(l - 1)] + 1;
  }
  return best;
}

inline SelectionResult select(SelectStrategy strategy, const Matrix& sv,
                              const Vector& sw, Index k) {
  switch (strategy) {
    case SelectStrategy::pinv: return select_pinv(sv, sw, k);
    case SelectStrategy::pinv2: return select_pinv2(sv, sw, k);
    case SelectStrategy::corr: return select_corr(sv, sw, k);
    case SelectStrategy::corr_pinv: return select_corr_pinv(sv, sw, k);
    case SelectStrategy::omp: return select_omp(sv, sw, k);
    case SelectStrategy::sp: return select_sp(sv, sw, k);
    case SelectStrategy::greedy: return select_greedy(sv, sw, k);
    case SelectStrategy::bruteforce: return select_bruteforce(sv, sw, k);
  }
  throw std::logic_error("select: unreachable");
}

}  // namespace ska
