#pragma once

#include <memory>
#include <string>
#include <vector>

#include "signspot/decoder.hpp"
#include "signspot/eval.hpp"
#include "signspot/fusion.hpp"
#include "signspot/io.hpp"
#include "signspot/lm.hpp"
#include "signspot/parallel.hpp"
#include "signspot/remote_lm.hpp"
#include "signspot/synth.hpp"

namespace signspot {

using io::DistributionCorpus;
using io::DistributionSentence;
using io::HypothesisSentence;
using io::SegmentedSentence;

// ---------------------------------------------------------------------------
// Spotting

inline DistributionCorpus spot_corpus(const std::vector<SegmentedSentence>& sentences,
                                      const Dictionary& dict, const FusionConfig& cfg,
                                      unsigned threads = 1) {
  cfg.validate();
  DistributionCorpus out;
  out.vocab = dict.glosses();
  out.sentences.resize(sentences.size());
  FusionConfig inner = cfg;
  inner.threads = 1;
  parallel_for(sentences.size(), threads, [&](std::size_t s) {
    const auto& in = sentences[s];
    DistributionSentence ds;
    ds.id = in.id;
    ds.reference = in.reference;
    for (std::size_t x = 0; x < in.segments.size(); ++x) {
      ds.segments.push_back(spot_segment(in.segments[x], dict, inner));
      if (x < in.reference.size()) {
        ds.targets.push_back(dict.index_of(in.reference[x]));
      } else {
        ds.targets.emplace_back(std::nullopt);
      }
    }
    out.sentences[s] = std::move(ds);
  });
  out.source = out.sentences.empty() || out.sentences[0].segments.empty()
                   ? SourceTag::SYNTH
                   : out.sentences[0].segments[0].source;
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic corpora

struct SynthStats {
  std::size_t sentences_in = 0;
  std::size_t sentences_out = 0;
  std::size_t empty_sentences = 0;  // nothing left after POS filtering / OOV removal
  std::size_t tokens = 0;
  std::size_t oov_tokens = 0;
};

/// Builds one noisy distribution per in-vocabulary pseudo-gloss token.
/// Sentence i draws from StreamRng(seed, i): clean distribution, then Word
/// Replacement, then Distribution Corruption. OOV tokens are dropped from both
/// the reference and the segment list and counted.
inline DistributionCorpus synthesize(const std::vector<TaggedSentence>& corpus,
                                     const EmbeddedVocabulary& vocab, const NoiseConfig& noise,
                                     SynthStats* stats = nullptr, unsigned threads = 1) {
  noise.validate();
  const std::vector<std::string> glosses = vocab.vocab().glosses();
  std::vector<std::optional<DistributionSentence>> slots(corpus.size());
  std::vector<std::size_t> tokens(corpus.size()), oov(corpus.size());

  parallel_for(corpus.size(), threads, [&](std::size_t i) {
    StreamRng rng(noise.seed, i);
    DistributionSentence s;
    s.id = "s" + std::to_string(i);
    for (const auto& g : pseudo_gloss(corpus[i])) {
      ++tokens[i];
      const auto idx = vocab.vocab().index_of(detail::to_lower(g));
      if (!idx) {
        ++oov[i];
        continue;
      }
      SimilarityDistribution d = vocab.clean_distribution(vocab.vocab()[*idx]);
      d = word_replacement(std::move(d), noise, rng);
      d = distribution_corruption(std::move(d), *idx, noise, rng);
      s.reference.push_back(glosses[*idx]);
      s.segments.push_back(std::move(d));
      s.targets.emplace_back(*idx);
    }
    if (!s.segments.empty()) slots[i] = std::move(s);
  });

  DistributionCorpus out;
  out.vocab = glosses;
  out.source = SourceTag::SYNTH;
  SynthStats st;
  st.sentences_in = corpus.size();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    st.tokens += tokens[i];
    st.oov_tokens += oov[i];
    if (slots[i]) {
      out.sentences.push_back(std::move(*slots[i]));
    } else {
      ++st.empty_sentences;
    }
  }
  st.sentences_out = out.sentences.size();
  out.meta = {{"noise",
               {{"wr", noise.wr_rate},
                {"dc", noise.dc_count},
                {"seed", noise.seed},
                {"wr_mode", std::string(to_string(noise.wr_mode))},
                {"dc_boost", noise.dc_boost}}},
              {"vocab_size", glosses.size()},
              {"stats",
               {{"sentences_in", st.sentences_in},
                {"sentences_out", st.sentences_out},
                {"empty_sentences", st.empty_sentences},
                {"tokens", st.tokens},
                {"oov_tokens", st.oov_tokens}}}};
  if (stats) *stats = st;
  return out;
}

inline std::vector<std::vector<std::string>> references_of(const DistributionCorpus& c) {
  std::vector<std::vector<std::string>> out;
  out.reserve(c.sentences.size());
  for (const auto& s : c.sentences) out.push_back(s.reference);
  return out;
}

// ---------------------------------------------------------------------------
// Language models

/// Builds the configured backend. NGRAM trains on `training_corpus`.
inline std::unique_ptr<TransitionModel> make_transition_model(
    const LmBackendConfig& cfg, const std::vector<std::vector<std::string>>& training_corpus = {}) {
  cfg.validate();
  switch (cfg.kind) {
    case LmKind::UNIFORM: return std::make_unique<UniformModel>();
    case LmKind::NGRAM:
      return std::make_unique<NgramModel>(train_ngram(training_corpus, cfg.ngram_order, cfg.smoothing_alpha));
    case LmKind::REMOTE: return std::make_unique<RemoteModel>(cfg);
  }
  throw ValidationError("unhandled LM backend");
}

// ---------------------------------------------------------------------------
// Decoding and metrics

inline std::vector<HypothesisSentence> decode_corpus(const DistributionCorpus& corpus,
                                                     const TransitionModel& lm,
                                                     const DecoderConfig& cfg, unsigned threads = 1) {
  cfg.validate();
  std::vector<HypothesisSentence> out(corpus.sentences.size());
  parallel_for(corpus.sentences.size(), threads, [&](std::size_t s) {
    const auto& in = corpus.sentences[s];
    std::vector<CandidateSet> sets;
    sets.reserve(in.segments.size());
    for (std::size_t x = 0; x < in.segments.size(); ++x)
      sets.push_back(normalize_and_topk(in.segments[x], corpus.vocab, cfg, x));
    out[s] = {in.id, in.reference, beam_search(sets, lm, cfg)};
  });
  return out;
}

/// Per-segment argmax sequence of each sentence, as single-hypothesis lists.
inline std::vector<HypothesisSentence> argmax_corpus(const DistributionCorpus& corpus) {
  std::vector<HypothesisSentence> out;
  for (const auto& s : corpus.sentences) {
    BeamHypothesis h;
    for (const auto& d : s.segments) h.glosses.push_back(corpus.vocab[d.argmax()]);
    out.push_back({s.id, s.reference, {std::move(h)}});
  }
  return out;
}

/// Segment-level Top-k accuracy over all segments with a known target.
inline std::map<int, double> corpus_topk_accuracy(const DistributionCorpus& corpus,
                                                  const std::vector<int>& ks) {
  std::vector<SimilarityDistribution> dists;
  std::vector<std::size_t> targets;
  for (const auto& s : corpus.sentences) {
    for (std::size_t x = 0; x < s.segments.size(); ++x) {
      if (x < s.targets.size() && s.targets[x]) {
        dists.push_back(s.segments[x]);
        targets.push_back(*s.targets[x]);
      }
    }
  }
  std::map<int, double> out;
  for (int k : ks) out[k] = topk_accuracy(dists, targets, k);
  return out;
}

/// Scores hypotheses against their embedded references; sentences lacking a
/// reference are skipped.
inline EvalReport evaluate_corpus(const std::vector<HypothesisSentence>& hyps, int oracle_n = 5) {
  std::vector<std::vector<std::string>> refs;
  std::vector<std::vector<BeamHypothesis>> ranked;
  for (const auto& h : hyps) {
    if (h.reference.empty()) continue;
    refs.push_back(h.reference);
    ranked.push_back(h.hypotheses);
  }
  if (refs.empty()) throw ValidationError("evaluate: no sentence carries a reference");
  return evaluate_hypotheses(refs, ranked, oracle_n);
}

}  // namespace signspot
