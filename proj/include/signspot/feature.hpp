#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "signspot/error.hpp"

namespace signspot {

enum class Modality { I3D, LH, RH, MID, SYNTH };

inline std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::I3D: return "I3D";
    case Modality::LH: return "LH";
    case Modality::RH: return "RH";
    case Modality::MID: return "MID";
    case Modality::SYNTH: return "SYNTH";
  }
  return "?";
}

inline Modality parse_modality(std::string_view s) {
  for (Modality m : {Modality::I3D, Modality::LH, Modality::RH, Modality::MID, Modality::SYNTH}) {
    if (to_string(m) == s) return m;
  }
  throw ValidationError("unknown modality '" + std::string(s) + "'");
}

/// Time-ordered per-frame feature vectors for one modality, stored row-major.
class FeatureSequence {
 public:
  FeatureSequence(std::size_t dim, std::vector<double> data, Modality modality = Modality::SYNTH)
      : dim_(dim), data_(std::move(data)), modality_(modality) {
    if (dim_ == 0) throw ValidationError("feature dimension must be positive");
    if (data_.empty()) throw ValidationError("feature sequence must have at least one frame");
    if (data_.size() % dim_ != 0)
      throw ValidationError("feature data size " + std::to_string(data_.size()) +
                            " is not a multiple of dim " + std::to_string(dim_));
    for (double v : data_) {
      if (!std::isfinite(v)) throw ValidationError("feature sequence contains a non-finite value");
    }
  }

  static FeatureSequence from_frames(const std::vector<std::vector<double>>& frames,
                                     Modality modality = Modality::SYNTH) {
    if (frames.empty()) throw ValidationError("feature sequence must have at least one frame");
    const std::size_t dim = frames.front().size();
    std::vector<double> data;
    data.reserve(dim * frames.size());
    for (std::size_t t = 0; t < frames.size(); ++t) {
      if (frames[t].size() != dim)
        throw ValidationError("frame " + std::to_string(t) + " has width " +
                              std::to_string(frames[t].size()) + ", expected " +
                              std::to_string(dim));
      data.insert(data.end(), frames[t].begin(), frames[t].end());
    }
    return FeatureSequence(dim, std::move(data), modality);
  }

  std::size_t frames() const noexcept { return data_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  Modality modality() const noexcept { return modality_; }
  std::span<const double> frame(std::size_t t) const { return {data_.data() + t * dim_, dim_}; }
  std::span<const double> data() const noexcept { return data_; }

  FeatureSequence with_modality(Modality m) const { return FeatureSequence(dim_, data_, m); }

  friend bool operator==(const FeatureSequence&, const FeatureSequence&) = default;

 private:
  std::size_t dim_;
  std::vector<double> data_;
  Modality modality_;
};

/// Fixed-size segment embedding obtained by temporal pooling.
class PooledVector {
 public:
  explicit PooledVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw ValidationError("pooled vector must be non-empty");
    for (double v : values_) {
      if (!std::isfinite(v)) throw ValidationError("pooled vector contains a non-finite value");
    }
  }

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const PooledVector&, const PooledVector&) = default;

 private:
  std::vector<double> values_;
};

}  // namespace signspot
