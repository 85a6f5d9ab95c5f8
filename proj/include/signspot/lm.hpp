#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "signspot/error.hpp"

namespace signspot {

/// p(candidate | context) request: context is the gloss prefix, possibly empty.
struct TransitionQuery {
  std::vector<std::string> context;
  std::vector<std::string> candidates;

  void validate() const {
    if (candidates.empty()) throw ValidationError("transition query has no candidates");
    std::set<std::string_view> seen;
    for (const auto& c : candidates) {
      if (!seen.insert(c).second)
        throw ValidationError("transition query has duplicate candidate '" + c + "'");
    }
  }
};

inline constexpr std::string_view kDefaultPromptText =
    "You are predicting the next word of a sign-language gloss sentence. "
    "Sentence so far: \"{CONTEXT}\". "
    "Choose exactly one of these options as the next word: {CANDIDATES}. "
    "The next word is:";

struct PromptTemplate {
  std::string text{kDefaultPromptText};
  std::string candidate_separator = ", ";
  std::string empty_context = "(start of sentence)";
  /// Context rendered lowercase with a leading capital ("Together we"),
  /// candidates capitalized ("Make"). Off: glosses are rendered verbatim.
  bool natural_case = true;

  void validate() const {
    for (std::string_view ph : {"{CONTEXT}", "{CANDIDATES}"}) {
      const auto first = text.find(ph);
      if (first == std::string::npos)
        throw ValidationError("prompt template is missing placeholder " + std::string(ph));
      if (text.find(ph, first + 1) != std::string::npos)
        throw ValidationError("prompt template repeats placeholder " + std::string(ph));
    }
  }
};

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::string capitalized(std::string_view s) {
  std::string out = lower(s);
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

}  // namespace detail

inline std::string render_candidate(const PromptTemplate& tpl, std::string_view gloss) {
  return tpl.natural_case ? detail::capitalized(gloss) : std::string(gloss);
}

inline std::string render_context(const PromptTemplate& tpl, std::span<const std::string> context) {
  if (context.empty()) return tpl.empty_context;
  std::string out;
  for (std::size_t i = 0; i < context.size(); ++i) {
    if (i) out += ' ';
    out += tpl.natural_case ? detail::lower(context[i]) : context[i];
  }
  if (tpl.natural_case)
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

/// Substitutes context and candidates into the template. Placeholder offsets are
/// taken from the template itself, so placeholder-like text inside glosses is
/// never expanded.
inline std::string build_prompt(const PromptTemplate& tpl, const TransitionQuery& query) {
  tpl.validate();
  query.validate();
  std::string cands;
  for (std::size_t i = 0; i < query.candidates.size(); ++i) {
    if (i) cands += tpl.candidate_separator;
    cands += render_candidate(tpl, query.candidates[i]);
  }
  std::string text = tpl.text;
  const auto ctx_pos = text.find("{CONTEXT}");
  const auto cand_pos = text.find("{CANDIDATES}");
  // Replace the later placeholder first so the earlier offset stays valid.
  if (ctx_pos > cand_pos) {
    text.replace(ctx_pos, 9, render_context(tpl, query.context));
    text.replace(cand_pos, 12, cands);
  } else {
    text.replace(cand_pos, 12, cands);
    text.replace(ctx_pos, 9, render_context(tpl, query.context));
  }
  return text;
}

/// Produces a probability vector over the query's candidates, in candidate order.
class TransitionModel {
 public:
  virtual ~TransitionModel() = default;
  virtual std::vector<double> probabilities(const TransitionQuery& query) const = 0;
  /// False for backends whose answers may change between runs.
  virtual bool deterministic() const { return true; }
  virtual std::string name() const = 0;
};

/// Softmax with max subtraction; entries that underflow are lifted to the
/// smallest normal double so no candidate ever has probability zero.
inline std::vector<double> softmax(std::span<const double> logits, double temperature = 1.0) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp((logits[i] - mx) / temperature);
    sum += out[i];
  }
  for (double& p : out) p = std::max(p / sum, std::numeric_limits<double>::min());
  return out;
}

/// Validated entry point used by the decoder.
inline std::vector<double> transition_probs(const TransitionQuery& query, const TransitionModel& model) {
  query.validate();
  std::vector<double> p = model.probabilities(query);
  if (p.size() != query.candidates.size())
    throw ValidationError(model.name() + " backend returned " + std::to_string(p.size()) +
                          " probabilities for " + std::to_string(query.candidates.size()) +
                          " candidates");
  for (double v : p) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ValidationError(model.name() + " backend returned a non-positive probability");
  }
  return p;
}

class UniformModel final : public TransitionModel {
 public:
  std::vector<double> probabilities(const TransitionQuery& query) const override {
    return std::vector<double>(query.candidates.size(),
                               1.0 / static_cast<double>(query.candidates.size()));
  }
  std::string name() const override { return "uniform"; }
};

/// Add-alpha smoothed n-gram model over gloss tokens. Sentences are padded with
/// order-1 begin-of-sequence markers; queries use the full order with no backoff
/// and are renormalized over the candidate set.
class NgramModel final : public TransitionModel {
 public:
  static constexpr std::string_view kBos = "<s>";

  NgramModel(int order, double smoothing_alpha) : order_(order), alpha_(smoothing_alpha) {
    if (order_ < 1) throw ValidationError("n-gram order must be >= 1");
    if (!(alpha_ > 0.0)) throw ValidationError("n-gram smoothing alpha must be positive");
    counts_.resize(static_cast<std::size_t>(order_));
  }

  void add_sentence(std::span<const std::string> sentence) {
    std::vector<std::string> padded(static_cast<std::size_t>(order_ - 1), std::string(kBos));
    padded.insert(padded.end(), sentence.begin(), sentence.end());
    const std::size_t start = static_cast<std::size_t>(order_ - 1);
    for (std::size_t pos = start; pos < padded.size(); ++pos) {
      for (int n = 1; n <= order_; ++n) {
        const std::size_t first = pos + 1 - static_cast<std::size_t>(n);
        ++counts_[static_cast<std::size_t>(n - 1)]
                 [key(std::span<const std::string>(padded).subspan(first, static_cast<std::size_t>(n)))];
      }
    }
  }

  /// Raw count of an n-gram (1 <= length <= order), including padding markers.
  std::size_t count(std::span<const std::string> ngram) const {
    if (ngram.empty() || ngram.size() > static_cast<std::size_t>(order_)) return 0;
    const auto& table = counts_[ngram.size() - 1];
    auto it = table.find(key(ngram));
    return it == table.end() ? 0 : it->second;
  }

  std::vector<double> probabilities(const TransitionQuery& query) const override {
    std::vector<std::string> gram = history(query.context);
    std::vector<double> p(query.candidates.size());
    double total = 0.0;
    for (std::size_t j = 0; j < query.candidates.size(); ++j) {
      gram.push_back(query.candidates[j]);
      p[j] = static_cast<double>(count(gram)) + alpha_;
      gram.pop_back();
      total += p[j];
    }
    for (double& v : p) v /= total;
    return p;
  }

  std::string name() const override { return "ngram"; }
  int order() const noexcept { return order_; }
  double smoothing_alpha() const noexcept { return alpha_; }

 private:
  static std::string key(std::span<const std::string> toks) {
    std::string k;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (i) k += '\x1f';
      k += toks[i];
    }
    return k;
  }

  // Last order-1 tokens of the BOS-padded context.
  std::vector<std::string> history(std::span<const std::string> context) const {
    const std::size_t need = static_cast<std::size_t>(order_ - 1);
    std::vector<std::string> h;
    h.reserve(need + 1);
    const std::size_t have = std::min(need, context.size());
    for (std::size_t i = have; i < need; ++i) h.emplace_back(kBos);
    for (std::size_t i = context.size() - have; i < context.size(); ++i) h.push_back(context[i]);
    return h;
  }

  int order_;
  double alpha_;
  std::vector<std::unordered_map<std::string, std::size_t>> counts_;
};

inline NgramModel train_ngram(const std::vector<std::vector<std::string>>& corpus, int order,
                              double smoothing_alpha = 0.1) {
  if (corpus.empty()) throw ValidationError("n-gram training corpus is empty");
  NgramModel model(order, smoothing_alpha);
  for (const auto& sentence : corpus) model.add_sentence(sentence);
  return model;
}

enum class LmKind { UNIFORM, NGRAM, REMOTE };

inline std::string_view to_string(LmKind k) {
  switch (k) {
    case LmKind::UNIFORM: return "uniform";
    case LmKind::NGRAM: return "ngram";
    case LmKind::REMOTE: return "remote";
  }
  return "?";
}

inline LmKind parse_lm_kind(std::string_view s) {
  const std::string l = detail::lower(s);
  for (LmKind k : {LmKind::UNIFORM, LmKind::NGRAM, LmKind::REMOTE}) {
    if (to_string(k) == l) return k;
  }
  throw ValidationError("unknown LM backend '" + std::string(s) + "'");
}

inline constexpr std::string_view kApiKeyEnv = "SIGNSPOT_LM_API_KEY";

struct LmBackendConfig {
  LmKind kind = LmKind::UNIFORM;
  int ngram_order = 2;
  double smoothing_alpha = 0.1;
  std::string endpoint_url;
  std::string model_name;
  int timeout_ms = 10000;
  int max_retries = 2;
  PromptTemplate prompt{};

  void validate() const {
    if (ngram_order < 1) throw ValidationError("ngram_order must be >= 1");
    if (!(smoothing_alpha > 0.0)) throw ValidationError("smoothing_alpha must be positive");
    if (timeout_ms <= 0) throw ValidationError("timeout_ms must be positive");
    if (max_retries < 0) throw ValidationError("max_retries must be non-negative");
    if (kind == LmKind::REMOTE && (endpoint_url.empty() || model_name.empty()))
      throw ValidationError("remote LM backend requires an endpoint URL and a model name");
    prompt.validate();
  }
};

}  // namespace signspot
