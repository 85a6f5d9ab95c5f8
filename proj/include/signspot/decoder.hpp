#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "signspot/dictionary.hpp"
#include "signspot/lm.hpp"

namespace signspot {

struct DecoderConfig {
  int top_k = 10;
  int beam_width = 5;
  double alpha_bs = 1.0;
  double softmax_temperature = 1.0;
  /// Number of most recent glosses passed to the LM as context; 0 = full prefix.
  int context_window = 0;

  void validate() const {
    if (top_k < 1) throw ValidationError("top_k must be >= 1");
    if (beam_width < 1) throw ValidationError("beam_width must be >= 1");
    if (!(alpha_bs >= 0.0) || !std::isfinite(alpha_bs))
      throw ValidationError("alpha_bs must be a non-negative finite number");
    if (!(softmax_temperature > 0.0)) throw ValidationError("softmax temperature must be positive");
    if (context_window < 0) throw ValidationError("context_window must be >= 0");
  }
};

struct Candidate {
  std::string gloss;
  std::size_t index = 0;  // dictionary index
  double emission = 0.0;
};

/// Top-k emissions for one segment, sorted by descending emission.
struct CandidateSet {
  std::size_t segment_index = 0;
  std::vector<Candidate> candidates;
};

/// Softmax over the full distribution (scores / temperature), then keep the k
/// highest entries. The kept emissions are not renormalized. Ties resolve to
/// the lower dictionary index.
inline CandidateSet normalize_and_topk(const SimilarityDistribution& dist,
                                       const std::vector<std::string>& glosses,
                                       const DecoderConfig& cfg, std::size_t segment_index = 0) {
  cfg.validate();
  dist.validate();
  if (dist.size() != glosses.size())
    throw ValidationError("distribution length " + std::to_string(dist.size()) +
                          " does not match vocabulary size " + std::to_string(glosses.size()));
  const auto k = static_cast<std::size_t>(cfg.top_k);
  if (k > dist.size())
    throw ValidationError("top_k " + std::to_string(k) + " exceeds vocabulary size " +
                          std::to_string(dist.size()));

  const std::vector<double> probs = softmax(dist.scores, cfg.softmax_temperature);
  std::vector<std::size_t> order(dist.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (dist.scores[a] != dist.scores[b]) return dist.scores[a] > dist.scores[b];
                      return a < b;
                    });
  CandidateSet out;
  out.segment_index = segment_index;
  out.candidates.reserve(k);
  for (std::size_t r = 0; r < k; ++r)
    out.candidates.push_back({glosses[order[r]], order[r], probs[order[r]]});
  return out;
}

inline CandidateSet normalize_and_topk(const SimilarityDistribution& dist, const Dictionary& dict,
                                       const DecoderConfig& cfg, std::size_t segment_index = 0) {
  return normalize_and_topk(dist, dict.glosses(), cfg, segment_index);
}

struct StepAudit {
  std::string gloss;
  double log_transition = 0.0;
  double emission = 0.0;
};

struct BeamHypothesis {
  std::vector<std::string> glosses;
  double score = 0.0;
  std::vector<StepAudit> per_step;

  double emission_sum() const {
    double s = 0.0;
    for (const auto& st : per_step) s += st.emission;
    return s;
  }
};

/// Sum over steps of log p + alpha_bs * s, accumulated in step order.
inline double recompute_score(const BeamHypothesis& h, double alpha_bs) {
  double s = 0.0;
  for (const auto& st : h.per_step) s += st.log_transition + alpha_bs * st.emission;
  return s;
}

/// Strict ordering used for pruning and output: higher score, then higher
/// cumulative emission, then lexicographically smaller gloss sequence.
inline bool hypothesis_before(const BeamHypothesis& a, const BeamHypothesis& b) {
  if (a.score != b.score) return a.score > b.score;
  const double ea = a.emission_sum(), eb = b.emission_sum();
  if (ea != eb) return ea > eb;
  return a.glosses < b.glosses;
}

/// Memoizes transition queries by (context, candidate list) for one decode.
class CachedTransitions {
 public:
  explicit CachedTransitions(const TransitionModel& model) : model_(model) {}

  const std::vector<double>& get(const TransitionQuery& q) {
    auto key = std::make_pair(q.context, q.candidates);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      ++hits_;
      return it->second;
    }
    return cache_.emplace(std::move(key), transition_probs(q, model_)).first->second;
  }

  std::size_t hits() const noexcept { return hits_; }
  std::size_t misses() const noexcept { return cache_.size(); }

 private:
  const TransitionModel& model_;
  std::map<std::pair<std::vector<std::string>, std::vector<std::string>>, std::vector<double>> cache_;
  std::size_t hits_ = 0;
};

/// Breadth-first beam search maximizing sum_x (log p(g_x | g_<x) + alpha_bs * s_x).
/// Each hypothesis conditions the LM on its own gloss prefix. Returns at most
/// beam_width hypotheses ordered by hypothesis_before.
inline std::vector<BeamHypothesis> beam_search(const std::vector<CandidateSet>& sets,
                                               const TransitionModel& lm, const DecoderConfig& cfg) {
  cfg.validate();
  if (sets.empty()) throw ValidationError("beam search needs at least one segment");
  CachedTransitions transitions(lm);
  const auto width = static_cast<std::size_t>(cfg.beam_width);

  std::vector<BeamHypothesis> beam(1);
  for (std::size_t x = 0; x < sets.size(); ++x) {
    const auto& cands = sets[x].candidates;
    if (cands.empty())
      throw ValidationError("candidate set for segment " + std::to_string(x) + " is empty");
    TransitionQuery query;
    query.candidates.reserve(cands.size());
    for (const auto& c : cands) query.candidates.push_back(c.gloss);

    std::vector<BeamHypothesis> next;
    next.reserve(beam.size() * cands.size());
    for (const auto& hyp : beam) {
      const std::size_t n = hyp.glosses.size();
      const std::size_t keep = cfg.context_window > 0
                                   ? std::min(n, static_cast<std::size_t>(cfg.context_window))
                                   : n;
      query.context.assign(hyp.glosses.end() - static_cast<std::ptrdiff_t>(keep), hyp.glosses.end());
      const std::vector<double>& p = transitions.get(query);
      for (std::size_t j = 0; j < cands.size(); ++j) {
        BeamHypothesis ext = hyp;
        const double lt = std::log(p[j]);
        ext.glosses.push_back(cands[j].gloss);
        ext.per_step.push_back({cands[j].gloss, lt, cands[j].emission});
        ext.score = hyp.score + (lt + cfg.alpha_bs * cands[j].emission);
        next.push_back(std::move(ext));
      }
    }
    const std::size_t kept = std::min(width, next.size());
    std::partial_sort(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(kept), next.end(),
                      hypothesis_before);
    next.resize(kept);
    beam = std::move(next);
  }
  return beam;
}

}  // namespace signspot
