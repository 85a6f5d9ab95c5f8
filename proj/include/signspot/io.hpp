#pragma once

#include <zlib.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "signspot/decoder.hpp"
#include "signspot/dictionary.hpp"
#include "signspot/error.hpp"
#include "signspot/synth.hpp"

namespace signspot::io {

using nlohmann::json;
namespace fs = std::filesystem;

inline constexpr std::string_view kFeaturesFormat = "signspot.features/1";
inline constexpr std::string_view kManifestFormat = "signspot.manifest/1";
inline constexpr std::string_view kDictionaryFormat = "signspot.dictionary/1";
inline constexpr std::string_view kSegmentsFormat = "signspot.segments/1";
inline constexpr std::string_view kDistributionsFormat = "signspot.distributions/1";
inline constexpr std::string_view kHypothesesFormat = "signspot.hypotheses/1";
inline constexpr std::string_view kReportFormat = "signspot.report/1";
inline constexpr std::string_view kSweepFormat = "signspot.sweep/1";

// ---------------------------------------------------------------------------
// Raw files

inline bool is_gzip_path(const fs::path& p) { return p.extension() == ".gz"; }

inline std::string read_file(const fs::path& path) {
  if (is_gzip_path(path)) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw IoError("cannot open " + path.string());
    std::string out;
    char buf[1 << 16];
    int n;
    while ((n = gzread(f, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(n));
    const bool bad = n < 0;
    gzclose(f);
    if (bad) throw IoError("corrupt compressed file " + path.string());
    return out;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes via a sibling temp file and rename, so readers never see a partial file.
inline void write_file_atomic(const fs::path& path, std::string_view content) {
  const fs::path tmp = path.string() + ".tmp";
  if (is_gzip_path(path)) {
    gzFile f = gzopen(tmp.c_str(), "wb");
    if (!f) throw IoError("cannot write " + tmp.string());
    const bool ok = content.empty() ||
                    gzwrite(f, content.data(), static_cast<unsigned>(content.size())) ==
                        static_cast<int>(content.size());
    if (gzclose(f) != Z_OK || !ok) throw IoError("failed writing " + tmp.string());
  } else {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

/// Non-empty lines with surrounding whitespace trimmed; '#' lines are comments.
inline std::vector<std::string> read_lines(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(b, e - b + 1));
  }
  return out;
}

inline json read_document(const fs::path& path, std::string_view expected_format) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": not a valid JSON document: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("format") || doc["format"] != expected_format)
    throw ValidationError(path.string() + ": expected format '" + std::string(expected_format) + "'");
  return doc;
}

inline void write_document(const fs::path& path, const json& doc) {
  write_file_atomic(path, doc.dump(1) + "\n");
}

// ---------------------------------------------------------------------------
// Features

inline json features_to_json(const FeatureSequence& f) {
  json frames = json::array();
  for (std::size_t t = 0; t < f.frames(); ++t) {
    const auto row = f.frame(t);
    frames.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return {{"modality", to_string(f.modality())}, {"dim", f.dim()}, {"frames", std::move(frames)}};
}

inline FeatureSequence features_from_json(const json& j) {
  try {
    const Modality m = parse_modality(j.at("modality").get<std::string>());
    const auto dim = j.at("dim").get<std::size_t>();
    const auto& frames = j.at("frames");
    if (!frames.is_array() || frames.empty())
      throw ValidationError("features need a non-empty 'frames' list");
    std::vector<double> data;
    data.reserve(dim * frames.size());
    for (std::size_t t = 0; t < frames.size(); ++t) {
      const auto& row = frames[t];
      if (!row.is_array() || row.size() != dim)
        throw ValidationError("frame " + std::to_string(t) + " does not have " + std::to_string(dim) +
                              " values");
      for (const auto& v : row) data.push_back(v.get<double>());
    }
    return FeatureSequence(dim, std::move(data), m);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed feature document: ") + e.what());
  }
}

inline FeatureSequence load_features(const fs::path& path) {
  try {
    return features_from_json(read_document(path, kFeaturesFormat));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

inline void save_features(const fs::path& path, const FeatureSequence& f) {
  json doc = features_to_json(f);
  doc["format"] = kFeaturesFormat;
  write_document(path, doc);
}

// A modality value is either an inline feature object or a path relative to `base`.
inline Segment segment_from_json(const json& features, const fs::path& base) {
  if (!features.is_object()) throw ValidationError("'features' must be an object keyed by modality");
  Segment seg;
  for (const auto& [key, value] : features.items()) {
    const Modality m = parse_modality(key);
    FeatureSequence f = value.is_string() ? load_features(base / value.get<std::string>())
                                          : features_from_json(value);
    if (f.modality() != m)
      throw ValidationError("feature stored under " + key + " declares modality " +
                            std::string(to_string(f.modality())));
    seg.emplace(m, std::move(f));
  }
  return seg;
}

// ---------------------------------------------------------------------------
// Dictionary manifest and archive

/// Manifest: {"format", "entries": [{"gloss": str, "features": {modality: path}}]}.
/// Errors name the offending entry.
inline std::vector<DictionaryEntry> load_manifest(const fs::path& path) {
  const json doc = read_document(path, kManifestFormat);
  const fs::path base = path.parent_path();
  std::vector<DictionaryEntry> entries;
  const auto& list = doc.value("entries", json::array());
  if (!list.is_array()) throw ValidationError(path.string() + ": 'entries' must be a list");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string gloss = list[i].value("gloss", std::string());
    try {
      entries.push_back({gloss, segment_from_json(list[i].at("features"), base)});
    } catch (const std::exception& e) {
      throw ValidationError(path.string() + ": entry " + std::to_string(i) + " ('" + gloss + "'): " + e.what());
    }
  }
  return entries;
}

inline json dictionary_to_json(const Dictionary& dict) {
  json mods = json::array();
  for (Modality m : dict.modalities()) mods.push_back(to_string(m));
  json entries = json::array();
  for (const auto& e : dict.entries()) {
    json feats = json::object();
    for (const auto& [m, f] : e.features) feats[std::string(to_string(m))] = features_to_json(f);
    entries.push_back({{"gloss", e.gloss}, {"features", std::move(feats)}});
  }
  return {{"format", kDictionaryFormat},
          {"vocab_size", dict.vocab_size()},
          {"modalities", std::move(mods)},
          {"entries", std::move(entries)}};
}

inline Dictionary dictionary_from_json(const json& doc) {
  try {
    std::set<Modality> mods;
    for (const auto& m : doc.at("modalities")) mods.insert(parse_modality(m.get<std::string>()));
    std::vector<DictionaryEntry> entries;
    for (const auto& e : doc.at("entries"))
      entries.push_back({e.at("gloss").get<std::string>(), segment_from_json(e.at("features"), {})});
    Dictionary dict = build_dictionary(std::move(entries), mods);
    if (doc.at("vocab_size").get<std::size_t>() != dict.vocab_size())
      throw ValidationError("vocab_size does not match the number of entries");
    return dict;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed dictionary archive: ") + e.what());
  }
}

inline Dictionary load_dictionary(const fs::path& path) {
  return dictionary_from_json(read_document(path, kDictionaryFormat));
}

// ---------------------------------------------------------------------------
// Segments

struct SegmentedSentence {
  std::string id;
  std::vector<std::string> reference;  // optional; one gloss per segment when present
  std::vector<Segment> segments;
};

/// {"format", "sentences": [{"id", "reference": [gloss...]?, "segments": [{"features": {...}}]}]}
inline std::vector<SegmentedSentence> load_segments(const fs::path& path) {
  const json doc = read_document(path, kSegmentsFormat);
  const fs::path base = path.parent_path();
  std::vector<SegmentedSentence> out;
  try {
    const auto& sentences = doc.at("sentences");
    for (std::size_t s = 0; s < sentences.size(); ++s) {
      const auto& js = sentences[s];
      SegmentedSentence sent;
      sent.id = js.value("id", "s" + std::to_string(s));
      for (const auto& g : js.value("reference", json::array()))
        sent.reference.push_back(canonical_gloss(g.get<std::string>()));
      for (const auto& seg : js.at("segments")) sent.segments.push_back(segment_from_json(seg.at("features"), base));
      if (sent.segments.empty()) throw ValidationError("sentence '" + sent.id + "' has no segments");
      if (!sent.reference.empty() && sent.reference.size() != sent.segments.size())
        throw ValidationError("sentence '" + sent.id + "' has " + std::to_string(sent.reference.size()) +
                              " reference glosses for " + std::to_string(sent.segments.size()) + " segments");
      out.push_back(std::move(sent));
    }
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": malformed segments document: " + e.what());
  }
  return out;
}

inline json segments_to_json(const std::vector<SegmentedSentence>& sentences) {
  json list = json::array();
  for (const auto& s : sentences) {
    json segs = json::array();
    for (const auto& seg : s.segments) {
      json feats = json::object();
      for (const auto& [m, f] : seg) feats[std::string(to_string(m))] = features_to_json(f);
      segs.push_back({{"features", std::move(feats)}});
    }
    json js = {{"id", s.id}, {"segments", std::move(segs)}};
    if (!s.reference.empty()) js["reference"] = s.reference;
    list.push_back(std::move(js));
  }
  return {{"format", kSegmentsFormat}, {"sentences", std::move(list)}};
}

// ---------------------------------------------------------------------------
// Distributions

struct DistributionSentence {
  std::string id;
  std::vector<std::string> reference;
  std::vector<SimilarityDistribution> segments;
  /// Vocabulary index of each segment's true gloss, when known.
  std::vector<std::optional<std::size_t>> targets;
};

struct DistributionCorpus {
  std::vector<std::string> vocab;
  SourceTag source = SourceTag::SYNTH;
  std::vector<DistributionSentence> sentences;
  json meta = json::object();
};

inline json distributions_to_json(const DistributionCorpus& c, int preview_k = 0) {
  json sentences = json::array();
  for (const auto& s : c.sentences) {
    json segs = json::array();
    for (std::size_t x = 0; x < s.segments.size(); ++x) {
      json js = {{"scores", s.segments[x].scores}};
      if (x < s.targets.size() && s.targets[x]) js["target"] = *s.targets[x];
      if (preview_k > 0) {
        DecoderConfig pc;
        pc.top_k = std::min<int>(preview_k, static_cast<int>(c.vocab.size()));
        json preview = json::array();
        for (const auto& cand : normalize_and_topk(s.segments[x], c.vocab, pc).candidates)
          preview.push_back({{"gloss", cand.gloss}, {"emission", cand.emission}});
        js["preview"] = std::move(preview);
      }
      segs.push_back(std::move(js));
    }
    sentences.push_back({{"id", s.id}, {"reference", s.reference}, {"segments", std::move(segs)}});
  }
  return {{"format", kDistributionsFormat},
          {"source", to_string(c.source)},
          {"meta", c.meta},
          {"vocab", c.vocab},
          {"sentences", std::move(sentences)}};
}

inline DistributionCorpus distributions_from_json(const json& doc) {
  try {
    DistributionCorpus c;
    c.source = parse_source_tag(doc.at("source").get<std::string>());
    c.vocab = doc.at("vocab").get<std::vector<std::string>>();
    c.meta = doc.value("meta", json::object());
    if (c.vocab.empty()) throw ValidationError("empty vocabulary");
    for (const auto& js : doc.at("sentences")) {
      DistributionSentence s;
      s.id = js.at("id").get<std::string>();
      s.reference = js.value("reference", std::vector<std::string>{});
      for (const auto& seg : js.at("segments")) {
        SimilarityDistribution d{seg.at("scores").get<std::vector<double>>(), c.source};
        if (d.size() != c.vocab.size())
          throw ValidationError("sentence '" + s.id + "' has a distribution of length " +
                                std::to_string(d.size()) + " for vocabulary " + std::to_string(c.vocab.size()));
        d.validate();
        s.segments.push_back(std::move(d));
        if (seg.contains("target")) {
          const auto t = seg["target"].get<std::size_t>();
          if (t >= c.vocab.size()) throw ValidationError("target index out of range");
          s.targets.emplace_back(t);
        } else {
          s.targets.emplace_back(std::nullopt);
        }
      }
      if (s.segments.empty()) throw ValidationError("sentence '" + s.id + "' has no segments");
      c.sentences.push_back(std::move(s));
    }
    return c;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed distributions document: ") + e.what());
  }
}

inline DistributionCorpus load_distributions(const fs::path& path) {
  try {
    return distributions_from_json(read_document(path, kDistributionsFormat));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Hypotheses

struct HypothesisSentence {
  std::string id;
  std::vector<std::string> reference;
  std::vector<BeamHypothesis> hypotheses;
};

inline json hypotheses_to_json(const std::vector<HypothesisSentence>& sentences, const json& meta) {
  json list = json::array();
  for (const auto& s : sentences) {
    json hyps = json::array();
    for (std::size_t r = 0; r < s.hypotheses.size(); ++r) {
      const auto& h = s.hypotheses[r];
      json steps = json::array();
      for (const auto& st : h.per_step)
        steps.push_back({{"gloss", st.gloss}, {"log_transition", st.log_transition}, {"emission", st.emission}});
      hyps.push_back({{"rank", r + 1}, {"glosses", h.glosses}, {"score", h.score}, {"steps", std::move(steps)}});
    }
    list.push_back({{"id", s.id}, {"reference", s.reference}, {"hypotheses", std::move(hyps)}});
  }
  return {{"format", kHypothesesFormat}, {"meta", meta}, {"sentences", std::move(list)}};
}

inline std::vector<HypothesisSentence> hypotheses_from_json(const json& doc) {
  try {
    std::vector<HypothesisSentence> out;
    for (const auto& js : doc.at("sentences")) {
      HypothesisSentence s;
      s.id = js.at("id").get<std::string>();
      s.reference = js.value("reference", std::vector<std::string>{});
      for (const auto& jh : js.at("hypotheses")) {
        BeamHypothesis h;
        h.glosses = jh.at("glosses").get<std::vector<std::string>>();
        h.score = jh.at("score").get<double>();
        for (const auto& st : jh.value("steps", json::array()))
          h.per_step.push_back({st.at("gloss").get<std::string>(), st.at("log_transition").get<double>(),
                                st.at("emission").get<double>()});
        s.hypotheses.push_back(std::move(h));
      }
      out.push_back(std::move(s));
    }
    return out;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed hypotheses document: ") + e.what());
  }
}

inline std::vector<HypothesisSentence> load_hypotheses(const fs::path& path) {
  try {
    return hypotheses_from_json(read_document(path, kHypothesesFormat));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Text inputs

inline std::vector<TaggedSentence> load_tagged_corpus(const fs::path& path) {
  std::vector<TaggedSentence> out;
  std::size_t n = 0;
  for (const auto& line : read_lines(path)) {
    ++n;
    try {
      out.push_back(parse_tagged_sentence(line));
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ": sentence " + std::to_string(n) + ": " + e.what());
    }
  }
  if (out.empty()) throw ValidationError(path.string() + ": no sentences");
  return out;
}

/// One gloss sequence per line, whitespace separated.
inline std::vector<std::vector<std::string>> load_gloss_corpus(const fs::path& path) {
  std::vector<std::vector<std::string>> out;
  for (const auto& line : read_lines(path)) {
    std::istringstream in(line);
    std::vector<std::string> glosses;
    for (std::string g; in >> g;) glosses.push_back(canonical_gloss(g));
    out.push_back(std::move(glosses));
  }
  return out;
}

inline std::unordered_set<std::string> load_word_set(const fs::path& path) {
  const auto lines = read_lines(path);
  return {lines.begin(), lines.end()};
}

}  // namespace signspot::io
