#pragma once

// Independent oracles and fixtures shared by the unit tests and the acceptance
// binary. Oracles deliberately avoid the library's own algorithms.

#include <httplib.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "signspot/signspot.hpp"

namespace fixtures {

using namespace signspot;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Random inputs

inline FeatureSequence random_sequence(std::mt19937_64& g, std::size_t frames, std::size_t dim,
                                       Modality m = Modality::SYNTH, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  std::vector<double> data(frames * dim);
  for (double& v : data) v = n(g);
  return FeatureSequence(dim, std::move(data), m);
}

inline std::vector<std::string> random_glosses(std::mt19937_64& g, std::size_t len, int alphabet) {
  std::uniform_int_distribution<int> pick(0, alphabet - 1);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < len; ++i) out.push_back("G" + std::to_string(pick(g)));
  return out;
}

// ---------------------------------------------------------------------------
// Oracles

namespace detail {

inline double frame_cost(const FeatureSequence& a, const FeatureSequence& b, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.dim(); ++d) {
    const double x = a.data()[i * a.dim() + d] - b.data()[j * b.dim() + d];
    s += x * x;
  }
  return std::sqrt(s);
}

inline void walk(const FeatureSequence& a, const FeatureSequence& b, std::size_t i, std::size_t j,
                 double acc, double& best) {
  acc += frame_cost(a, b, i, j);
  if (i + 1 == a.frames() && j + 1 == b.frames()) {
    best = std::min(best, acc);
    return;
  }
  if (i + 1 < a.frames()) walk(a, b, i + 1, j, acc, best);
  if (j + 1 < b.frames()) walk(a, b, i, j + 1, acc, best);
  if (i + 1 < a.frames() && j + 1 < b.frames()) walk(a, b, i + 1, j + 1, acc, best);
}

inline std::size_t edits(const std::vector<std::string>& r, std::size_t i, const std::vector<std::string>& h,
                         std::size_t j) {
  if (i == r.size()) return h.size() - j;
  if (j == h.size()) return r.size() - i;
  const std::size_t sub = edits(r, i + 1, h, j + 1) + (r[i] == h[j] ? 0 : 1);
  const std::size_t del = edits(r, i + 1, h, j) + 1;
  const std::size_t ins = edits(r, i, h, j + 1) + 1;
  return std::min({sub, del, ins});
}

}  // namespace detail

/// Minimum cost over every monotone warping path, enumerated explicitly.
inline double brute_force_dtw(const FeatureSequence& a, const FeatureSequence& b) {
  double best = std::numeric_limits<double>::infinity();
  detail::walk(a, b, 0, 0, 0.0, best);
  return best;
}

/// Plain recursive Levenshtein distance (exponential; keep inputs short).
inline std::size_t brute_force_edits(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
  return detail::edits(ref, 0, hyp, 0);
}

struct ExhaustiveBest {
  std::vector<std::string> glosses;
  double score = -std::numeric_limits<double>::infinity();
};

/// Enumerates every path through the candidate sets and evaluates the
/// decoding objective directly against the model, with no pruning or caching.
/// Ties keep the lexicographically smaller path among equal score and emission.
inline ExhaustiveBest exhaustive_decode(const std::vector<CandidateSet>& sets, const TransitionModel& lm,
                                        double alpha_bs) {
  ExhaustiveBest best;
  double best_emission = -1.0;
  std::vector<std::size_t> pick(sets.size(), 0);
  for (;;) {
    std::vector<std::string> path;
    double score = 0.0, emission = 0.0;
    for (std::size_t x = 0; x < sets.size(); ++x) {
      TransitionQuery q;
      q.context = path;
      for (const auto& c : sets[x].candidates) q.candidates.push_back(c.gloss);
      const auto p = lm.probabilities(q);
      const auto& c = sets[x].candidates[pick[x]];
      score += std::log(p[pick[x]]) + alpha_bs * c.emission;
      emission += c.emission;
      path.push_back(c.gloss);
    }
    const bool better = score > best.score ||
                        (score == best.score && (emission > best_emission ||
                                                 (emission == best_emission && path < best.glosses)));
    if (better) {
      best = {path, score};
      best_emission = emission;
    }
    std::size_t x = 0;
    while (x < sets.size() && ++pick[x] == sets[x].candidates.size()) pick[x++] = 0;
    if (x == sets.size()) break;
  }
  return best;
}

/// Rank of `target` by an explicit full sort (descending score, ascending index).
inline std::size_t sorted_rank(const std::vector<double>& scores, std::size_t target) {
  std::vector<std::size_t> idx(scores.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
  });
  return static_cast<std::size_t>(std::find(idx.begin(), idx.end(), target) - idx.begin());
}

// ---------------------------------------------------------------------------
// Random decoding instances

struct DecodeInstance {
  std::vector<CandidateSet> sets;
  std::vector<std::vector<std::string>> lm_corpus;
};

/// X segments with k candidates each, drawn from a small shared alphabet, plus
/// a short random training corpus over that alphabet.
inline DecodeInstance random_decode_instance(std::mt19937_64& g, std::size_t x_len, std::size_t k,
                                             int alphabet = 6) {
  DecodeInstance inst;
  std::vector<std::string> vocab;
  for (int i = 0; i < alphabet; ++i) vocab.push_back("W" + std::to_string(i));
  std::uniform_real_distribution<double> score(-3.0, 3.0);
  DecoderConfig cfg;
  cfg.top_k = static_cast<int>(k);
  for (std::size_t x = 0; x < x_len; ++x) {
    SimilarityDistribution d;
    for (int i = 0; i < alphabet; ++i) d.scores.push_back(score(g));
    inst.sets.push_back(normalize_and_topk(d, vocab, cfg, x));
  }
  std::uniform_int_distribution<int> len(1, 5), tok(0, alphabet - 1);
  for (int s = 0; s < 8; ++s) {
    std::vector<std::string> sent;
    for (int i = len(g); i > 0; --i) sent.push_back(vocab[static_cast<std::size_t>(tok(g))]);
    inst.lm_corpus.push_back(std::move(sent));
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Synthetic sign features

struct FeatureDims {
  std::size_t i3d = 6;
  std::size_t rh = 4;
  std::size_t lh = 4;
};

struct FeatureDataset {
  std::vector<DictionaryEntry> entries;
  std::vector<SegmentedSentence> sentences;
};

inline FeatureSequence warp_and_noise(std::mt19937_64& g, const FeatureSequence& proto,
                                      const std::vector<std::size_t>& frame_map, double noise) {
  std::normal_distribution<double> n(0.0, noise);
  std::vector<double> data;
  for (std::size_t t : frame_map) {
    for (double v : proto.frame(t)) data.push_back(v + n(g));
  }
  return FeatureSequence(proto.dim(), std::move(data), proto.modality());
}

/// V random glosses with I3D/RH/LH prototypes, and sentences whose segments are
/// time-warped noisy copies of the glosses' prototypes. I3D is made the noisier
/// stream so fusion weights visibly matter.
inline FeatureDataset make_feature_dataset(std::uint64_t seed, std::size_t vocab, std::size_t sentences,
                                           std::size_t max_len = 4, double i3d_noise = 0.9,
                                           double rh_noise = 0.5, FeatureDims dims = {}) {
  std::mt19937_64 g(seed);
  FeatureDataset ds;
  std::uniform_int_distribution<std::size_t> frames(3, 5);
  for (std::size_t v = 0; v < vocab; ++v) {
    const std::size_t t = frames(g);
    Segment seg;
    seg.emplace(Modality::I3D, random_sequence(g, t, dims.i3d, Modality::I3D));
    seg.emplace(Modality::RH, random_sequence(g, t, dims.rh, Modality::RH));
    seg.emplace(Modality::LH, random_sequence(g, t, dims.lh, Modality::LH));
    ds.entries.push_back({"GLOSS" + std::to_string(v), std::move(seg)});
  }
  std::uniform_int_distribution<std::size_t> len(1, max_len), pick(0, vocab - 1);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t s = 0; s < sentences; ++s) {
    SegmentedSentence sent;
    sent.id = "f" + std::to_string(s);
    for (std::size_t x = len(g); x > 0; --x) {
      const auto& e = ds.entries[pick(g)];
      const std::size_t t = e.features.at(Modality::I3D).frames();
      std::vector<std::size_t> frame_map;
      for (std::size_t f = 0; f < t; ++f) {
        frame_map.push_back(f);
        if (coin(g) && coin(g)) frame_map.push_back(f);
      }
      Segment seg;
      seg.emplace(Modality::I3D, warp_and_noise(g, e.features.at(Modality::I3D), frame_map, i3d_noise));
      seg.emplace(Modality::RH, warp_and_noise(g, e.features.at(Modality::RH), frame_map, rh_noise));
      seg.emplace(Modality::LH, warp_and_noise(g, e.features.at(Modality::LH), frame_map, rh_noise));
      sent.reference.push_back(e.gloss);
      sent.segments.push_back(std::move(seg));
    }
    ds.sentences.push_back(std::move(sent));
  }
  return ds;
}

/// Writes feature files, a manifest and a segments document under `dir`.
/// Returns {manifest path, segments path}.
inline std::pair<fs::path, fs::path> write_feature_dataset(const FeatureDataset& ds, const fs::path& dir) {
  fs::create_directories(dir / "features");
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t i = 0; i < ds.entries.size(); ++i) {
    nlohmann::json feats = nlohmann::json::object();
    for (const auto& [m, f] : ds.entries[i].features) {
      const std::string rel = "features/e" + std::to_string(i) + "_" + std::string(to_string(m)) + ".json";
      io::save_features(dir / rel, f);
      feats[std::string(to_string(m))] = rel;
    }
    entries.push_back({{"gloss", ds.entries[i].gloss}, {"features", feats}});
  }
  const fs::path manifest = dir / "manifest.json";
  io::write_document(manifest, {{"format", io::kManifestFormat}, {"entries", entries}});
  const fs::path segments = dir / "segments.json";
  io::write_document(segments, io::segments_to_json(ds.sentences));
  return {manifest, segments};
}

// ---------------------------------------------------------------------------
// Filesystem

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("signspot-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const noexcept { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string slurp(const fs::path& p) { return io::read_file(p); }

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

inline CommandResult run_command(const std::string& cmd) {
  CommandResult r;
  FILE* pipe = ::popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// ---------------------------------------------------------------------------
// Stub logprob endpoint

/// Local HTTP server speaking the continuation-logprob wire format. Each
/// continuation (" Make") maps to a list of token logprobs; unknown
/// continuations get {-10}. Failure injection knobs apply to every request.
class StubLogprobServer {
 public:
  StubLogprobServer() {
    server_.Post("/v1/logprobs", [this](const httplib::Request& req, httplib::Response& res) {
      const int n = ++requests_;
      if (delay_ms_ > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_.load()));
      if (n <= fail_first_) {
        res.status = fail_status_;
        return;
      }
      if (always_status_ != 0) {
        res.status = always_status_;
        return;
      }
      const auto body = nlohmann::json::parse(req.body);
      {
        std::lock_guard lock(mu_);
        last_prompt_ = body.at("prompt").get<std::string>();
        last_auth_ = req.get_header_value("Authorization");
        models_seen_.push_back(body.at("model").get<std::string>());
      }
      if (malformed_) {
        res.set_content("{\"tokens\": []", "application/json");
        return;
      }
      const std::string cont = body.at("continuation").get<std::string>();
      std::vector<double> lps{-10.0};
      {
        std::lock_guard lock(mu_);
        if (auto it = logprobs_.find(cont); it != logprobs_.end()) lps = it->second;
      }
      nlohmann::json out = {{"tokens", std::vector<std::string>(lps.size(), cont)}, {"token_logprobs", lps}};
      res.set_content(out.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubLogprobServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  StubLogprobServer(const StubLogprobServer&) = delete;
  StubLogprobServer& operator=(const StubLogprobServer&) = delete;

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/logprobs"; }
  int port() const noexcept { return port_; }

  void set_logprobs(const std::string& continuation, std::vector<double> lps) {
    std::lock_guard lock(mu_);
    logprobs_[continuation] = std::move(lps);
  }
  void set_delay_ms(int ms) { delay_ms_ = ms; }
  void fail_first(int n, int status = 503) {
    fail_first_ = n;
    fail_status_ = status;
  }
  void always_status(int status) { always_status_ = status; }
  void set_malformed(bool m) { malformed_ = m; }

  int requests() const noexcept { return requests_.load(); }
  void reset_requests() { requests_ = 0; }
  std::string last_prompt() const {
    std::lock_guard lock(mu_);
    return last_prompt_;
  }
  std::string last_auth() const {
    std::lock_guard lock(mu_);
    return last_auth_;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
  mutable std::mutex mu_;
  std::map<std::string, std::vector<double>> logprobs_;
  std::string last_prompt_, last_auth_;
  std::vector<std::string> models_seen_;
  std::atomic<int> requests_{0};
  std::atomic<int> delay_ms_{0};
  std::atomic<int> fail_first_{0};
  std::atomic<int> fail_status_{503};
  std::atomic<int> always_status_{0};
  std::atomic<bool> malformed_{false};
};

inline LmBackendConfig remote_config(const StubLogprobServer& stub, int timeout_ms = 2000, int retries = 2) {
  LmBackendConfig cfg;
  cfg.kind = LmKind::REMOTE;
  cfg.endpoint_url = stub.url();
  cfg.model_name = "stub-model";
  cfg.timeout_ms = timeout_ms;
  cfg.max_retries = retries;
  return cfg;
}

// ---------------------------------------------------------------------------
// Bundled demo data

inline fs::path demo_dir() { return fs::path(SIGNSPOT_DATA_DIR) / "demo"; }

inline Vocabulary demo_vocab(std::size_t size = 1500) {
  return build_vocab(io::read_lines(demo_dir() / "frequency.txt"), io::load_word_set(demo_dir() / "sign_lexicon.txt"),
                     size);
}

inline std::vector<TaggedSentence> demo_corpus() { return io::load_tagged_corpus(demo_dir() / "corpus.tagged"); }

}  // namespace fixtures
