#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "signspot/feature.hpp"
#include "signspot/parallel.hpp"
#include "signspot/similarity.hpp"

namespace signspot {

/// Uppercases, collapses internal whitespace runs into single hyphens and trims.
/// Underscores are kept, so fingerspelled items keep their FS_ prefix.
inline std::string canonical_gloss(std::string_view raw) {
  std::string out;
  bool pending_space = false;
  for (char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back('-');
    pending_space = false;
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

using Segment = std::map<Modality, FeatureSequence>;

struct DictionaryEntry {
  std::string gloss;
  Segment features;
};

struct DictionaryOptions {
  /// Nearest-index resample RH/LH to the I3D frame count before building MID.
  bool resample_to_i3d = false;
};

namespace detail {

inline FeatureSequence resample_nearest(const FeatureSequence& s, std::size_t frames) {
  if (s.frames() == frames) return s;
  std::vector<double> data;
  data.reserve(frames * s.dim());
  const double ratio = static_cast<double>(s.frames()) / static_cast<double>(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    const auto src = std::min(s.frames() - 1, static_cast<std::size_t>((t + 0.5) * ratio));
    const auto f = s.frame(src);
    data.insert(data.end(), f.begin(), f.end());
  }
  return FeatureSequence(s.dim(), std::move(data), s.modality());
}

}  // namespace detail

/// Frame-wise concatenation in the fixed order I3D, RH, LH.
inline FeatureSequence concat_modalities(const FeatureSequence& i3d, const FeatureSequence& rh,
                                         const FeatureSequence& lh, bool resample = false) {
  const std::size_t t = i3d.frames();
  if (!resample && (rh.frames() != t || lh.frames() != t))
    throw ValidationError("concat: frame-count mismatch (I3D " + std::to_string(t) + ", RH " +
                          std::to_string(rh.frames()) + ", LH " + std::to_string(lh.frames()) +
                          ")");
  const FeatureSequence r = detail::resample_nearest(rh, t);
  const FeatureSequence l = detail::resample_nearest(lh, t);
  const std::size_t dim = i3d.dim() + r.dim() + l.dim();
  std::vector<double> data;
  data.reserve(dim * t);
  for (std::size_t f = 0; f < t; ++f) {
    for (const FeatureSequence* part : {&i3d, &r, &l}) {
      const auto row = part->frame(f);
      data.insert(data.end(), row.begin(), row.end());
    }
  }
  return FeatureSequence(dim, std::move(data), Modality::MID);
}

inline std::optional<FeatureSequence> mid_from_components(const Segment& seg, bool resample) {
  if (auto it = seg.find(Modality::MID); it != seg.end()) return it->second;
  auto i3d = seg.find(Modality::I3D);
  auto rh = seg.find(Modality::RH);
  auto lh = seg.find(Modality::LH);
  if (i3d == seg.end() || rh == seg.end() || lh == seg.end()) return std::nullopt;
  return concat_modalities(i3d->second, rh->second, lh->second, resample);
}

/// Immutable gloss dictionary. Entry order defines the index space of every
/// SimilarityDistribution computed against it.
class Dictionary {
 public:
  std::size_t vocab_size() const noexcept { return entries_.size(); }
  const std::vector<DictionaryEntry>& entries() const noexcept { return entries_; }
  const std::vector<Modality>& modalities() const noexcept { return modalities_; }
  const std::vector<std::string>& glosses() const noexcept { return glosses_; }

  bool has_modality(Modality m) const {
    return std::find(modalities_.begin(), modalities_.end(), m) != modalities_.end();
  }

  std::optional<std::size_t> index_of(std::string_view gloss) const {
    auto it = index_.find(canonical_gloss(gloss));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const FeatureSequence& features(std::size_t i, Modality m) const {
    return entries_.at(i).features.at(m);
  }
  const PooledVector& pooled(std::size_t i, Modality m) const { return pooled_.at(m).at(i); }

  std::size_t dim(Modality m) const { return features(0, m).dim(); }

 private:
  friend Dictionary build_dictionary(std::vector<DictionaryEntry>, const std::set<Modality>&,
                                     const DictionaryOptions&);

  std::vector<DictionaryEntry> entries_;
  std::vector<Modality> modalities_;
  std::vector<std::string> glosses_;
  std::unordered_map<std::string, std::size_t> index_;
  std::map<Modality, std::vector<PooledVector>> pooled_;
};

/// Validates entries and restricts them to `modality_config`. MID is derived by
/// concatenation when an entry provides I3D, RH and LH but no explicit MID.
inline Dictionary build_dictionary(std::vector<DictionaryEntry> entries,
                                   const std::set<Modality>& modality_config,
                                   const DictionaryOptions& opts = {}) {
  if (entries.empty()) throw ValidationError("dictionary: no entries");
  if (modality_config.empty()) throw ValidationError("dictionary: empty modality configuration");

  Dictionary dict;
  dict.modalities_.assign(modality_config.begin(), modality_config.end());
  std::map<Modality, std::size_t> dims;

  for (std::size_t i = 0; i < entries.size(); ++i) {
    DictionaryEntry& raw = entries[i];
    DictionaryEntry entry;
    entry.gloss = canonical_gloss(raw.gloss);
    if (entry.gloss.empty())
      throw ValidationError("dictionary: entry " + std::to_string(i) + " has an empty gloss");
    if (dict.index_.count(entry.gloss))
      throw ValidationError("dictionary: duplicate gloss '" + entry.gloss + "'");

    for (Modality m : modality_config) {
      std::optional<FeatureSequence> seq;
      if (auto it = raw.features.find(m); it != raw.features.end()) {
        seq = it->second.with_modality(m);
      } else if (m == Modality::MID) {
        try {
          seq = mid_from_components(raw.features, opts.resample_to_i3d);
        } catch (const ValidationError& e) {
          throw ValidationError("dictionary: entry '" + entry.gloss + "': " + e.what());
        }
      }
      if (!seq)
        throw ValidationError("dictionary: entry '" + entry.gloss + "' is missing modality " +
                              std::string(to_string(m)));
      auto [d, inserted] = dims.emplace(m, seq->dim());
      if (!inserted && d->second != seq->dim())
        throw ValidationError("dictionary: entry '" + entry.gloss + "' has " +
                              std::string(to_string(m)) + " dim " + std::to_string(seq->dim()) +
                              ", expected " + std::to_string(d->second));
      dict.pooled_[m].push_back(mean_pool(*seq));
      entry.features.emplace(m, std::move(*seq));
    }
    dict.index_.emplace(entry.gloss, i);
    dict.glosses_.push_back(entry.gloss);
    dict.entries_.push_back(std::move(entry));
  }
  return dict;
}

/// Returns a new dictionary containing all current entries followed by `entry`.
inline Dictionary extend_dictionary(const Dictionary& dict, DictionaryEntry entry,
                                    const DictionaryOptions& opts = {}) {
  std::vector<DictionaryEntry> all = dict.entries();
  all.push_back(std::move(entry));
  return build_dictionary(std::move(all),
                          std::set<Modality>(dict.modalities().begin(), dict.modalities().end()),
                          opts);
}

enum class SourceTag { I3D, LH, RH, MID, LATE, ENSEMBLE, SYNTH };

inline std::string_view to_string(SourceTag t) {
  switch (t) {
    case SourceTag::I3D: return "I3D";
    case SourceTag::LH: return "LH";
    case SourceTag::RH: return "RH";
    case SourceTag::MID: return "MID";
    case SourceTag::LATE: return "LATE";
    case SourceTag::ENSEMBLE: return "ENSEMBLE";
    case SourceTag::SYNTH: return "SYNTH";
  }
  return "?";
}

inline SourceTag parse_source_tag(std::string_view s) {
  for (SourceTag t : {SourceTag::I3D, SourceTag::LH, SourceTag::RH, SourceTag::MID,
                      SourceTag::LATE, SourceTag::ENSEMBLE, SourceTag::SYNTH}) {
    if (to_string(t) == s) return t;
  }
  throw ValidationError("unknown distribution source '" + std::string(s) + "'");
}

inline SourceTag source_for(Modality m) {
  switch (m) {
    case Modality::I3D: return SourceTag::I3D;
    case Modality::LH: return SourceTag::LH;
    case Modality::RH: return SourceTag::RH;
    case Modality::MID: return SourceTag::MID;
    case Modality::SYNTH: return SourceTag::SYNTH;
  }
  return SourceTag::SYNTH;
}

/// Score vector over the full vocabulary for one segment; index i refers to
/// entry i of the dictionary it was computed against.
struct SimilarityDistribution {
  std::vector<double> scores;
  SourceTag source = SourceTag::SYNTH;

  std::size_t size() const noexcept { return scores.size(); }

  void validate() const {
    if (scores.empty()) throw ValidationError("similarity distribution is empty");
    for (double s : scores) {
      if (!std::isfinite(s)) throw ValidationError("similarity distribution has a non-finite score");
    }
  }

  /// Index of the highest score; ties resolve to the lowest index.
  std::size_t argmax() const {
    return static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) -
                                    scores.begin());
  }
};

enum class LookupMode { COMBINED, DTW_ONLY };

struct LookupOptions {
  LookupMode mode = LookupMode::COMBINED;
  double alpha_s = 0.3;
  DtwOptions dtw{};
  unsigned threads = 1;
};

/// Scores one segment against every entry of `dict` for modality `m`.
inline SimilarityDistribution lookup(const Segment& segment, const Dictionary& dict, Modality m,
                                     const LookupOptions& opts = {}) {
  if (!dict.has_modality(m))
    throw ValidationError("lookup: dictionary has no " + std::string(to_string(m)) + " features");
  auto it = segment.find(m);
  if (it == segment.end())
    throw ValidationError("lookup: segment is missing modality " + std::string(to_string(m)));
  const FeatureSequence& u = it->second;
  if (u.dim() != dict.dim(m))
    throw ValidationError("lookup: segment " + std::string(to_string(m)) + " dim " +
                          std::to_string(u.dim()) + " does not match dictionary dim " +
                          std::to_string(dict.dim(m)));
  if (opts.mode == LookupMode::COMBINED) detail::check_alpha_s(opts.alpha_s);

  SimilarityDistribution out;
  out.source = source_for(m);
  out.scores.resize(dict.vocab_size());
  const PooledVector pooled_u = mean_pool(u);
  parallel_for(dict.vocab_size(), opts.threads, [&](std::size_t i) {
    const FeatureSequence& d = dict.features(i, m);
    out.scores[i] = opts.mode == LookupMode::DTW_ONLY
                        ? 0.0 - dtw_distance(u, d, opts.dtw)
                        : detail::combined_with_pooled(u, pooled_u, d, dict.pooled(i, m),
                                                       opts.alpha_s, opts.dtw);
  });
  return out;
}

}  // namespace signspot
