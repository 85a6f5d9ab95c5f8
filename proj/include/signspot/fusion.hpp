#pragma once

#include <algorithm>
#include <string>
#include <string_view>

#include "signspot/dictionary.hpp"

namespace signspot {

enum class FusionStrategy { I3D_ONLY, RH_ONLY, LATE, MID, ENSEMBLE };

inline std::string_view to_string(FusionStrategy s) {
  switch (s) {
    case FusionStrategy::I3D_ONLY: return "I3D_ONLY";
    case FusionStrategy::RH_ONLY: return "RH_ONLY";
    case FusionStrategy::LATE: return "LATE";
    case FusionStrategy::MID: return "MID";
    case FusionStrategy::ENSEMBLE: return "ENSEMBLE";
  }
  return "?";
}

inline FusionStrategy parse_fusion_strategy(std::string_view s) {
  std::string up(s);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::toupper(c));
  });
  for (FusionStrategy f : {FusionStrategy::I3D_ONLY, FusionStrategy::RH_ONLY, FusionStrategy::LATE,
                           FusionStrategy::MID, FusionStrategy::ENSEMBLE}) {
    if (to_string(f) == up) return f;
  }
  throw ValidationError("unknown fusion strategy '" + std::string(s) + "'");
}

struct FusionConfig {
  FusionStrategy strategy = FusionStrategy::LATE;
  double alpha_s_i3d = 0.3;
  double alpha_s_rh = 0.9;
  double alpha_late = 0.9;
  double alpha_ens = 0.6;
  /// Min-max rescale both inputs to [0,1] before LATE/ENSEMBLE fusion.
  bool rescale = false;
  /// Resample RH/LH onto the I3D frame count when building MID features.
  bool resample_mid = false;
  DtwOptions dtw{};
  unsigned threads = 1;

  void validate() const {
    for (auto [name, v] : {std::pair{"alpha_s_i3d", alpha_s_i3d}, std::pair{"alpha_s_rh", alpha_s_rh},
                           std::pair{"alpha_late", alpha_late}, std::pair{"alpha_ens", alpha_ens}}) {
      if (!(v >= 0.0 && v <= 1.0))
        throw ValidationError(std::string(name) + " must lie in [0,1], got " + std::to_string(v));
    }
  }
};

namespace detail {

inline void check_fusable(const SimilarityDistribution& a, const SimilarityDistribution& b,
                          double alpha) {
  if (a.size() != b.size())
    throw ValidationError("fusion: length mismatch (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ValidationError("fusion weight must lie in [0,1], got " + std::to_string(alpha));
}

inline SimilarityDistribution weighted_sum(const SimilarityDistribution& a,
                                           const SimilarityDistribution& b, double alpha,
                                           SourceTag tag) {
  check_fusable(a, b, alpha);
  SimilarityDistribution out;
  out.source = tag;
  out.scores.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    out.scores[i] = alpha * a.scores[i] + (1.0 - alpha) * b.scores[i];
  return out;
}

}  // namespace detail

/// alpha_late * S_i3d + (1 - alpha_late) * S_rh, elementwise.
inline SimilarityDistribution late_fuse(const SimilarityDistribution& s_i3d,
                                        const SimilarityDistribution& s_rh, double alpha_late) {
  return detail::weighted_sum(s_i3d, s_rh, alpha_late, SourceTag::LATE);
}

/// alpha_ens * S_mid + (1 - alpha_ens) * S_i3d, elementwise.
inline SimilarityDistribution ensemble_fuse(const SimilarityDistribution& s_mid,
                                            const SimilarityDistribution& s_i3d, double alpha_ens) {
  return detail::weighted_sum(s_mid, s_i3d, alpha_ens, SourceTag::ENSEMBLE);
}

/// Affine map of the scores onto [0,1]; a constant distribution maps to all zeros.
inline SimilarityDistribution minmax_rescale(SimilarityDistribution d) {
  if (d.scores.empty()) return d;
  auto [lo, hi] = std::minmax_element(d.scores.begin(), d.scores.end());
  const double min = *lo, range = *hi - *lo;
  for (double& s : d.scores) s = range > 0.0 ? (s - min) / range : 0.0;
  return d;
}

/// Runs dictionary lookup(s) for one segment and fuses them per `cfg.strategy`.
inline SimilarityDistribution spot_segment(const Segment& segment, const Dictionary& dict,
                                           const FusionConfig& cfg) {
  cfg.validate();
  auto combined = [&](Modality m, double alpha_s) {
    return lookup(segment, dict, m,
                  LookupOptions{LookupMode::COMBINED, alpha_s, cfg.dtw, cfg.threads});
  };
  auto mid = [&] {
    Segment with_mid;
    auto feats = mid_from_components(segment, cfg.resample_mid);
    if (!feats) throw ValidationError("spot: segment provides neither MID nor I3D+RH+LH features");
    with_mid.emplace(Modality::MID, std::move(*feats));
    return lookup(with_mid, dict, Modality::MID,
                  LookupOptions{LookupMode::DTW_ONLY, 0.0, cfg.dtw, cfg.threads});
  };
  auto prep = [&](SimilarityDistribution d) { return cfg.rescale ? minmax_rescale(std::move(d)) : d; };

  switch (cfg.strategy) {
    case FusionStrategy::I3D_ONLY: return combined(Modality::I3D, cfg.alpha_s_i3d);
    case FusionStrategy::RH_ONLY: return combined(Modality::RH, cfg.alpha_s_rh);
    case FusionStrategy::LATE:
      return late_fuse(prep(combined(Modality::I3D, cfg.alpha_s_i3d)),
                       prep(combined(Modality::RH, cfg.alpha_s_rh)), cfg.alpha_late);
    case FusionStrategy::MID: return mid();
    case FusionStrategy::ENSEMBLE:
      return ensemble_fuse(prep(mid()), prep(combined(Modality::I3D, cfg.alpha_s_i3d)),
                           cfg.alpha_ens);
  }
  throw ValidationError("spot: unhandled fusion strategy");
}

/// Modalities a dictionary must carry for `s`.
inline std::set<Modality> required_modalities(FusionStrategy s) {
  switch (s) {
    case FusionStrategy::I3D_ONLY: return {Modality::I3D};
    case FusionStrategy::RH_ONLY: return {Modality::RH};
    case FusionStrategy::LATE: return {Modality::I3D, Modality::RH};
    case FusionStrategy::MID: return {Modality::MID};
    case FusionStrategy::ENSEMBLE: return {Modality::MID, Modality::I3D};
  }
  return {};
}

}  // namespace signspot
