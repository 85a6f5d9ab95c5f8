#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "signspot/dictionary.hpp"
#include "signspot/error.hpp"
#include "signspot/rng.hpp"
#include "signspot/similarity.hpp"

namespace signspot {

// ---------------------------------------------------------------------------
// Vocabulary

/// Ordered list of unique lowercase words; position i is dictionary index i.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (words_[i].empty()) throw ValidationError("vocabulary contains an empty word");
      if (!index_.emplace(words_[i], i).second)
        throw ValidationError("vocabulary contains duplicate word '" + words_[i] + "'");
    }
  }

  std::size_t size() const noexcept { return words_.size(); }
  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::string& operator[](std::size_t i) const { return words_[i]; }

  std::optional<std::size_t> index_of(std::string_view word) const {
    auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Uppercase gloss labels aligned with words().
  std::vector<std::string> glosses() const {
    std::vector<std::string> out;
    out.reserve(words_.size());
    for (const auto& w : words_) out.push_back(canonical_gloss(w));
    return out;
  }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
};

namespace detail {

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace detail

/// The `target_size` most frequent words that also appear in `sign_lexicon`,
/// in frequency order. Matching is case-insensitive; result words are lowercase.
inline Vocabulary build_vocab(const std::vector<std::string>& frequency_list,
                              const std::unordered_set<std::string>& sign_lexicon,
                              std::size_t target_size) {
  if (target_size == 0) throw ValidationError("vocabulary size must be positive");
  std::unordered_set<std::string> lexicon;
  for (const auto& w : sign_lexicon) lexicon.insert(detail::to_lower(w));
  std::unordered_set<std::string> taken;
  std::vector<std::string> words;
  for (const auto& raw : frequency_list) {
    std::string w = detail::to_lower(raw);
    if (!lexicon.count(w) || !taken.insert(w).second) continue;
    words.push_back(std::move(w));
  }
  if (target_size > words.size())
    throw ValidationError("requested vocabulary size " + std::to_string(target_size) +
                          " exceeds the " + std::to_string(words.size()) +
                          " words shared by the frequency list and the sign lexicon");
  words.resize(target_size);
  return Vocabulary(std::move(words));
}

// ---------------------------------------------------------------------------
// Pseudo-glosses

/// Universal POS tag inventory accepted in tagged corpora.
inline constexpr std::array<std::string_view, 17> kPosTags = {
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};

/// Tags whose tokens survive pseudo-gloss filtering.
inline constexpr std::array<std::string_view, 7> kGlossTags = {"NOUN", "NUM",  "ADV", "PRON",
                                                               "PROPN", "ADJ", "VERB"};

struct TaggedToken {
  std::string word;
  std::string tag;
};

struct TaggedSentence {
  std::vector<TaggedToken> tokens;
};

/// Parses "word/TAG word/TAG ..."; the tag is whatever follows the last '/'.
inline TaggedSentence parse_tagged_sentence(std::string_view line) {
  TaggedSentence sentence;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) {
    const auto slash = tok.rfind('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == tok.size())
      throw ValidationError("malformed tagged token '" + tok + "' (expected word/TAG)");
    std::string tag = tok.substr(slash + 1);
    if (std::find(kPosTags.begin(), kPosTags.end(), tag) == kPosTags.end())
      throw ValidationError("unknown POS tag '" + tag + "' in token '" + tok + "'");
    sentence.tokens.push_back({tok.substr(0, slash), std::move(tag)});
  }
  if (sentence.tokens.empty()) throw ValidationError("tagged sentence is empty");
  return sentence;
}

/// Uppercased words of content-tagged tokens, original order preserved.
inline std::vector<std::string> pseudo_gloss(const TaggedSentence& sentence) {
  std::vector<std::string> out;
  for (const auto& t : sentence.tokens) {
    if (std::find(kGlossTags.begin(), kGlossTags.end(), t.tag) != kGlossTags.end())
      out.push_back(canonical_gloss(t.word));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Word embedders

class WordEmbedder {
 public:
  virtual ~WordEmbedder() = default;
  virtual std::vector<double> embed(std::string_view word) const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;
};

/// Hashes the character trigrams of "<word>" (lowercased) into a fixed-width
/// count vector and L2-normalizes it. Words sharing trigrams score higher.
class TrigramEmbedder final : public WordEmbedder {
 public:
  explicit TrigramEmbedder(std::size_t dim = 512) : dim_(dim) {
    if (dim_ == 0) throw ValidationError("embedder dimension must be positive");
  }

  std::vector<double> embed(std::string_view word) const override {
    const std::string w = "<" + detail::to_lower(word) + ">";
    std::vector<double> v(dim_, 0.0);
    for (std::size_t i = 0; i + 3 <= w.size(); ++i) v[fnv1a(std::string_view(w).substr(i, 3)) % dim_] += 1.0;
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    for (double& x : v) x /= n;
    return v;
  }

  std::size_t dim() const override { return dim_; }
  std::string name() const override { return "trigram-" + std::to_string(dim_); }

  static constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

 private:
  std::size_t dim_;
};

/// Word vectors loaded from a text file: one "word v1 v2 ..." per line. A
/// leading "<count> <dim>" header line (fastText .vec style) is skipped.
class VectorFileEmbedder final : public WordEmbedder {
 public:
  static VectorFileEmbedder load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open word-vector file " + path);
    VectorFileEmbedder e;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::istringstream ls(line);
      std::string word;
      if (!(ls >> word)) continue;
      std::vector<double> v;
      for (double x; ls >> x;) v.push_back(x);
      if (!ls.eof())
        throw ValidationError(path + ":" + std::to_string(lineno) + ": non-numeric vector entry");
      if (lineno == 1 && v.size() == 1 && word.find_first_not_of("0123456789") == std::string::npos)
        continue;
      if (v.empty()) throw ValidationError(path + ":" + std::to_string(lineno) + ": empty vector");
      if (e.dim_ == 0) e.dim_ = v.size();
      if (v.size() != e.dim_)
        throw ValidationError(path + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(e.dim_) + " values, got " + std::to_string(v.size()));
      e.vectors_.emplace(detail::to_lower(word), std::move(v));
    }
    if (e.vectors_.empty()) throw ValidationError("word-vector file " + path + " has no vectors");
    return e;
  }

  std::vector<double> embed(std::string_view word) const override {
    auto it = vectors_.find(detail::to_lower(word));
    if (it == vectors_.end()) throw ValidationError("no vector for word '" + std::string(word) + "'");
    return it->second;
  }

  bool contains(std::string_view word) const { return vectors_.count(detail::to_lower(word)) > 0; }
  std::size_t dim() const override { return dim_; }
  std::string name() const override { return "vectors"; }

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

/// Vocabulary with every word embedded once, for repeated clean-distribution queries.
class EmbeddedVocabulary {
 public:
  EmbeddedVocabulary(Vocabulary vocab, const WordEmbedder& embedder)
      : vocab_(std::move(vocab)) {
    vectors_.reserve(vocab_.size());
    for (const auto& w : vocab_.words()) vectors_.push_back(embedder.embed(w));
  }

  const Vocabulary& vocab() const noexcept { return vocab_; }

  /// Cosine similarity of `target` against every vocabulary word. The target's
  /// own entry is exactly 1.0, so it ranks first unless another word embeds
  /// identically.
  SimilarityDistribution clean_distribution(std::string_view target) const {
    const auto idx = vocab_.index_of(detail::to_lower(target));
    if (!idx) throw ValidationError("out-of-vocabulary target '" + std::string(target) + "'");
    const std::vector<double>& t = vectors_[*idx];
    SimilarityDistribution d;
    d.source = SourceTag::SYNTH;
    d.scores.resize(vocab_.size());
    for (std::size_t i = 0; i < vocab_.size(); ++i) d.scores[i] = cosine_similarity(t, vectors_[i]);
    d.scores[*idx] = 1.0;
    return d;
  }

 private:
  Vocabulary vocab_;
  std::vector<std::vector<double>> vectors_;
};

inline SimilarityDistribution clean_distribution(std::string_view target, const Vocabulary& vocab,
                                                 const WordEmbedder& embedder) {
  return EmbeddedVocabulary(vocab, embedder).clean_distribution(target);
}

// ---------------------------------------------------------------------------
// Noise injection

/// Where the true top-1 entry ends up after Word Replacement.
enum class ReplacementMode {
  /// The random word takes rank 1; everything above its old rank moves down one,
  /// so the former top-1 lands at rank 2.
  SHIFT,
  /// Swap the scores of the top-1 entry and the random word.
  SWAP,
  /// The random word takes rank 1 and the former top-1 drops to the last rank.
  DEMOTE_LAST,
};

inline std::string_view to_string(ReplacementMode m) {
  switch (m) {
    case ReplacementMode::SHIFT: return "shift";
    case ReplacementMode::SWAP: return "swap";
    case ReplacementMode::DEMOTE_LAST: return "last";
  }
  return "?";
}

inline ReplacementMode parse_replacement_mode(std::string_view s) {
  for (ReplacementMode m : {ReplacementMode::SHIFT, ReplacementMode::SWAP, ReplacementMode::DEMOTE_LAST}) {
    if (to_string(m) == s) return m;
  }
  throw ValidationError("unknown replacement mode '" + std::string(s) + "' (shift, swap, last)");
}

struct NoiseConfig {
  double wr_rate = 0.0;
  int dc_count = 0;
  std::uint64_t seed = 0;
  ReplacementMode wr_mode = ReplacementMode::SHIFT;
  /// Corrupted entries are set to previous_max + u with u uniform on (0, dc_boost].
  double dc_boost = 0.1;

  void validate() const {
    if (!(wr_rate >= 0.0 && wr_rate <= 1.0))
      throw ValidationError("wr_rate must lie in [0,1], got " + std::to_string(wr_rate));
    if (dc_count < 0) throw ValidationError("dc_count must be non-negative");
    if (!(dc_boost > 0.0)) throw ValidationError("dc_boost must be positive");
  }
};

namespace detail {

// Indices sorted by descending score, ties by ascending index.
inline std::vector<std::size_t> ranking(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace detail

/// With probability wr_rate, a uniformly chosen non-top entry is promoted to
/// rank 1 (see ReplacementMode for where the old top-1 goes). The multiset of
/// scores is always preserved.
inline SimilarityDistribution word_replacement(SimilarityDistribution dist, const NoiseConfig& cfg,
                                               StreamRng& rng) {
  cfg.validate();
  const std::size_t v = dist.size();
  if (cfg.wr_rate > 0.0 && v < 2)
    throw ValidationError("word replacement needs a vocabulary of at least 2 entries");
  if (!(rng.uniform01() < cfg.wr_rate)) return dist;

  const auto order = detail::ranking(dist.scores);
  std::vector<double> sorted(v);
  for (std::size_t r = 0; r < v; ++r) sorted[r] = dist.scores[order[r]];
  const std::size_t picked = 1 + static_cast<std::size_t>(rng.uniform_below(v - 1));

  // new_order[r] = entry that receives the r-th largest score.
  std::vector<std::size_t> new_order;
  new_order.reserve(v);
  switch (cfg.wr_mode) {
    case ReplacementMode::SWAP:
      new_order = order;
      std::swap(new_order[0], new_order[picked]);
      break;
    case ReplacementMode::SHIFT:
      new_order.push_back(order[picked]);
      for (std::size_t r = 0; r < v; ++r)
        if (r != picked) new_order.push_back(order[r]);
      break;
    case ReplacementMode::DEMOTE_LAST:
      new_order.push_back(order[picked]);
      for (std::size_t r = 1; r < v; ++r)
        if (r != picked) new_order.push_back(order[r]);
      new_order.push_back(order[0]);
      break;
  }
  for (std::size_t r = 0; r < v; ++r) dist.scores[new_order[r]] = sorted[r];
  return dist;
}

/// Boosts dc_count entries drawn uniformly from the least similar half of the
/// non-target entries (ranked by current score) to previous_max + u,
/// u uniform on (0, dc_boost]. The target entry is never touched.
inline SimilarityDistribution distribution_corruption(SimilarityDistribution dist,
                                                      std::size_t target_index,
                                                      const NoiseConfig& cfg, StreamRng& rng) {
  cfg.validate();
  const auto m = static_cast<std::size_t>(cfg.dc_count);
  if (m == 0) return dist;
  const std::size_t v = dist.size();
  if (m >= v)
    throw ValidationError("dc_count " + std::to_string(m) + " must be smaller than the vocabulary size " +
                          std::to_string(v));
  if (target_index >= v) throw ValidationError("target index out of range");

  auto order = detail::ranking(dist.scores);
  std::vector<std::size_t> pool;
  pool.reserve(v - 1);
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if (*it != target_index) pool.push_back(*it);
  const std::size_t pool_size = std::max(m, (pool.size() + 1) / 2);

  const double prev_max = *std::max_element(dist.scores.begin(), dist.scores.end());
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(pool_size - i));
    std::swap(pool[i], pool[j]);
    const double u = cfg.dc_boost * (1.0 - rng.uniform01());
    double boosted = prev_max + u;
    if (!(boosted > prev_max)) boosted = std::nextafter(prev_max, INFINITY);
    dist.scores[pool[i]] = boosted;
  }
  return dist;
}

}  // namespace signspot
