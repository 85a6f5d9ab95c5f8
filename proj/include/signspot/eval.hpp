#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "signspot/decoder.hpp"
#include "signspot/dictionary.hpp"

namespace signspot {

/// Unit-cost Levenshtein distance over gloss tokens.
inline std::size_t edit_distance(std::span<const std::string> ref, std::span<const std::string> hyp) {
  std::vector<std::size_t> row(hyp.size() + 1);
  for (std::size_t j = 0; j <= hyp.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= ref.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= hyp.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (ref[i - 1] == hyp[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[hyp.size()];
}

/// (S + I + D) / |ref|. Not clamped: long hypotheses can exceed 1.
inline double wer(std::span<const std::string> ref, std::span<const std::string> hyp) {
  if (ref.empty()) throw ValidationError("wer: empty reference");
  return static_cast<double>(edit_distance(ref, hyp)) / static_cast<double>(ref.size());
}

/// 0-based rank of `target` when entries are ordered by descending score, ties by index.
inline std::size_t target_rank(const SimilarityDistribution& d, std::size_t target) {
  if (target >= d.size()) throw ValidationError("target index out of range");
  const double t = d.scores[target];
  std::size_t rank = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.scores[i] > t || (d.scores[i] == t && i < target)) ++rank;
  }
  return rank;
}

inline double topk_accuracy(std::span<const SimilarityDistribution> dists,
                            std::span<const std::size_t> targets, int k) {
  if (dists.size() != targets.size())
    throw ValidationError("topk_accuracy: " + std::to_string(dists.size()) + " distributions vs " +
                          std::to_string(targets.size()) + " targets");
  if (k < 1) throw ValidationError("topk_accuracy: k must be >= 1");
  if (dists.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    if (target_rank(dists[i], targets[i]) < static_cast<std::size_t>(k)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(dists.size());
}

/// Best WER among the first min(n, available) ranked hypotheses.
inline double oracle_wer(std::span<const BeamHypothesis> ranked, std::span<const std::string> ref,
                         int n) {
  if (ranked.empty()) throw ValidationError("oracle_wer: no hypotheses");
  if (n < 1) throw ValidationError("oracle_wer: n must be >= 1");
  const std::size_t m = std::min(ranked.size(), static_cast<std::size_t>(n));
  double best = wer(ref, ranked[0].glosses);
  for (std::size_t i = 1; i < m; ++i) best = std::min(best, wer(ref, ranked[i].glosses));
  return best;
}

struct SentenceResult {
  std::vector<std::string> reference;
  std::vector<std::string> hypothesis;
  double wer = 0.0;
  double oracle_wer = 0.0;
};

/// Corpus WERs are total edits over total reference tokens; the Top-n figure
/// takes, per sentence, the best of the n highest-ranked hypotheses.
struct EvalReport {
  double wer_top1 = 0.0;
  double wer_top5 = 0.0;
  std::map<int, double> topk_accuracy;
  std::size_t sentence_count = 0;
  std::vector<SentenceResult> per_sentence;
};

inline EvalReport evaluate_hypotheses(const std::vector<std::vector<std::string>>& references,
                                      const std::vector<std::vector<BeamHypothesis>>& ranked,
                                      int oracle_n = 5) {
  if (references.size() != ranked.size())
    throw ValidationError("evaluate: " + std::to_string(references.size()) + " references vs " +
                          std::to_string(ranked.size()) + " hypothesis lists");
  EvalReport r;
  r.sentence_count = references.size();
  std::size_t ref_tokens = 0, edits1 = 0, edits_n = 0;
  for (std::size_t s = 0; s < references.size(); ++s) {
    const auto& ref = references[s];
    const auto& hyps = ranked[s];
    if (hyps.empty()) throw ValidationError("evaluate: sentence " + std::to_string(s) + " has no hypotheses");
    const std::size_t e1 = edit_distance(ref, hyps[0].glosses);
    std::size_t best = e1;
    const std::size_t m = std::min(hyps.size(), static_cast<std::size_t>(oracle_n));
    for (std::size_t i = 1; i < m; ++i) best = std::min(best, edit_distance(ref, hyps[i].glosses));
    ref_tokens += ref.size();
    edits1 += e1;
    edits_n += best;
    SentenceResult sr;
    sr.reference = ref;
    sr.hypothesis = hyps[0].glosses;
    if (!ref.empty()) {
      sr.wer = static_cast<double>(e1) / static_cast<double>(ref.size());
      sr.oracle_wer = static_cast<double>(best) / static_cast<double>(ref.size());
    }
    r.per_sentence.push_back(std::move(sr));
  }
  if (ref_tokens == 0) throw ValidationError("evaluate: all references are empty");
  r.wer_top1 = static_cast<double>(edits1) / static_cast<double>(ref_tokens);
  r.wer_top5 = static_cast<double>(edits_n) / static_cast<double>(ref_tokens);
  return r;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
  double value = 0.0;
  double top1 = 0.0;
  double top5 = 0.0;
};

struct SweepGrid {
  std::string parameter;
  std::vector<double> values;
  /// "accuracy" (higher is better) or "wer" (lower is better).
  std::string metric = "accuracy";
  std::vector<SweepRow> rows;

  void validate() const {
    if (values.empty()) throw ValidationError("sweep grid has no values");
    if (!std::is_sorted(values.begin(), values.end()))
      throw ValidationError("sweep grid values must be sorted ascending");
  }
};

/// {0.0, 0.1, ..., 1.0}, each value computed as i/10 so endpoints are exact.
inline std::vector<double> unit_grid(int steps = 10) {
  std::vector<double> v;
  for (int i = 0; i <= steps; ++i) v.push_back(static_cast<double>(i) / steps);
  return v;
}

/// Thrown when a pipeline run fails mid-sweep; carries the rows completed so far.
class SweepAborted : public Error {
 public:
  SweepAborted(SweepGrid partial, const std::string& why)
      : Error("sweep over " + partial.parameter + " aborted after " +
              std::to_string(partial.rows.size()) + " row(s): " + why),
        partial_(std::move(partial)) {}
  const SweepGrid& partial() const noexcept { return partial_; }

 private:
  SweepGrid partial_;
};

/// Evaluates `run(value) -> {top1, top5}` once per grid value, in ascending order.
template <typename Run>
SweepGrid run_sweep(SweepGrid grid, Run&& run) {
  grid.validate();
  grid.rows.clear();
  for (double v : grid.values) {
    try {
      const std::pair<double, double> m = run(v);
      grid.rows.push_back({v, m.first, m.second});
    } catch (const std::exception& e) {
      throw SweepAborted(std::move(grid), e.what());
    }
  }
  return grid;
}

inline std::string sweep_column_label(const std::string& parameter, double value) {
  char buf[64];
  if (parameter == "vocab_size") {
    std::snprintf(buf, sizeof buf, "D%.0f", value);
  } else if (parameter == "wr") {
    std::snprintf(buf, sizeof buf, "WR=%.0f%%", value * 100.0);
  } else if (parameter == "dc" || parameter == "beam_width" || parameter == "top_k") {
    std::snprintf(buf, sizeof buf, "%s=%.0f",
                  parameter == "dc" ? "DC" : parameter == "top_k" ? "k" : "BW", value);
  } else {
    std::snprintf(buf, sizeof buf, "a=%g", value);
  }
  return buf;
}

/// Plain-text table: one column per grid value, Top-5 and Top-1 rows.
inline std::string render_table(const SweepGrid& grid) {
  std::vector<std::string> header{grid.parameter + " (" + grid.metric + ")"};
  std::vector<std::string> top5{"Top-5"}, top1{"Top-1"};
  char buf[32];
  for (const auto& row : grid.rows) {
    header.push_back(sweep_column_label(grid.parameter, row.value));
    std::snprintf(buf, sizeof buf, "%.4f", row.top5);
    top5.emplace_back(buf);
    std::snprintf(buf, sizeof buf, "%.4f", row.top1);
    top1.emplace_back(buf);
  }
  std::vector<std::size_t> width(header.size());
  for (const auto* line : {&header, &top5, &top1})
    for (std::size_t c = 0; c < line->size(); ++c) width[c] = std::max(width[c], (*line)[c].size());
  std::ostringstream out;
  for (const auto* line : {&header, &top5, &top1}) {
    for (std::size_t c = 0; c < line->size(); ++c) {
      if (c) out << " | ";
      out << (*line)[c] << std::string(width[c] - (*line)[c].size(), ' ');
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace signspot
