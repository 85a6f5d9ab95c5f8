#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "signspot/feature.hpp"

namespace signspot {

struct DtwOptions {
  /// Divide the cumulative cost by (T_a + T_b). Off by default: callers get the raw path cost.
  bool normalize = false;
};

namespace detail {

inline double euclidean(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

inline double norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

}  // namespace detail

/// Minimum cumulative Euclidean frame cost over all monotone warping paths
/// from (0,0) to (T_a-1, T_b-1) using steps (1,0), (0,1), (1,1).
inline double dtw_distance(const FeatureSequence& a, const FeatureSequence& b,
                           const DtwOptions& opts = {}) {
  if (a.dim() != b.dim())
    throw ValidationError("dtw: dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                          std::to_string(b.dim()) + ")");
  const std::size_t ta = a.frames();
  const std::size_t tb = b.frames();

  // Two rolling rows over b; row i holds D(i, *).
  std::vector<double> prev(tb), curr(tb);
  for (std::size_t i = 0; i < ta; ++i) {
    const auto fa = a.frame(i);
    for (std::size_t j = 0; j < tb; ++j) {
      const double cost = detail::euclidean(fa, b.frame(j));
      double best;
      if (i == 0 && j == 0) {
        best = 0.0;
      } else if (i == 0) {
        best = curr[j - 1];
      } else if (j == 0) {
        best = prev[j];
      } else {
        best = std::min({prev[j], curr[j - 1], prev[j - 1]});
      }
      curr[j] = cost + best;
    }
    std::swap(prev, curr);
  }
  const double total = prev[tb - 1];
  return opts.normalize ? total / static_cast<double>(ta + tb) : total;
}

/// Coordinate-wise arithmetic mean over frames.
inline PooledVector mean_pool(const FeatureSequence& a) {
  std::vector<double> acc(a.dim(), 0.0);
  for (std::size_t t = 0; t < a.frames(); ++t) {
    const auto f = a.frame(t);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += f[i];
  }
  const double n = static_cast<double>(a.frames());
  for (double& v : acc) v /= n;
  return PooledVector(std::move(acc));
}

inline double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw ValidationError("cosine: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                          std::to_string(v.size()) + ")");
  const double nu = detail::norm(u);
  const double nv = detail::norm(v);
  if (nu == 0.0 || nv == 0.0) throw ValidationError("cosine: zero-norm vector (degenerate feature)");
  double dot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
  return std::clamp(dot / (nu * nv), -1.0, 1.0);
}

inline double cosine_similarity(const PooledVector& u, const PooledVector& v) {
  return cosine_similarity(u.values(), v.values());
}

namespace detail {

inline void check_alpha_s(double alpha_s) {
  if (!(alpha_s >= 0.0 && alpha_s <= 1.0))
    throw ValidationError("alpha_s must lie in [0,1], got " + std::to_string(alpha_s));
}

// Shared by combined_score and dictionary lookup so both produce identical bits.
inline double combined_with_pooled(const FeatureSequence& u, const PooledVector& pooled_u,
                                   const FeatureSequence& d, const PooledVector& pooled_d,
                                   double alpha_s, const DtwOptions& opts) {
  double score = 0.0;
  if (alpha_s != 1.0) score += (alpha_s - 1.0) * dtw_distance(u, d, opts);
  if (alpha_s != 0.0) score += alpha_s * cosine_similarity(pooled_u, pooled_d);
  return score;
}

}  // namespace detail

/// Weighted similarity of a segment against a prototype:
///   (alpha_s - 1) * dtw + alpha_s * cos(pool(u), pool(d)).
/// The DTW term carries a non-positive weight so that higher is always more similar.
/// A term whose weight is exactly zero is not evaluated.
inline double combined_score(const FeatureSequence& u, const FeatureSequence& d, double alpha_s,
                             const DtwOptions& opts = {}) {
  detail::check_alpha_s(alpha_s);
  if (u.dim() != d.dim())
    throw ValidationError("combined_score: dimension mismatch (" + std::to_string(u.dim()) +
                          " vs " + std::to_string(d.dim()) + ")");
  return detail::combined_with_pooled(u, mean_pool(u), d, mean_pool(d), alpha_s, opts);
}

}  // namespace signspot
