// signspot: dictionary-based sign spotting, LM-guided gloss disambiguation and
// synthetic noise evaluation from the command line.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "signspot/signspot.hpp"

namespace {

using namespace signspot;
using nlohmann::json;

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kValidation = 2,
  kTransport = 3,
  kIo = 4,
};

struct SpotArgs {
  std::string strategy = "LATE";
  double alpha_s = 0.3;
  double alpha_s_rh = 0.9;
  double alpha_late = 0.9;
  double alpha_ens = 0.6;
  bool rescale = false;
  bool resample = false;
  bool dtw_normalize = false;

  FusionConfig config(unsigned threads) const {
    FusionConfig c;
    c.strategy = parse_fusion_strategy(strategy);
    c.alpha_s_i3d = alpha_s;
    c.alpha_s_rh = alpha_s_rh;
    c.alpha_late = alpha_late;
    c.alpha_ens = alpha_ens;
    c.rescale = rescale;
    c.resample_mid = resample;
    c.dtw.normalize = dtw_normalize;
    c.threads = threads;
    return c;
  }
};

struct DecodeArgs {
  int top_k = 10;
  int beam_width = 5;
  double alpha_bs = 1.0;
  double temperature = 1.0;
  int context_window = 0;

  DecoderConfig config() const {
    DecoderConfig c;
    c.top_k = top_k;
    c.beam_width = beam_width;
    c.alpha_bs = alpha_bs;
    c.softmax_temperature = temperature;
    c.context_window = context_window;
    return c;
  }
};

struct LmArgs {
  std::string kind = "uniform";
  int ngram_order = 2;
  double smoothing = 0.1;
  std::string corpus;
  std::string corpus_format = "auto";
  std::string endpoint;
  std::string model;
  int timeout_ms = 10000;
  int max_retries = 2;
  std::string prompt_file;
  bool prompt_verbatim = false;

  LmBackendConfig config() const {
    LmBackendConfig c;
    c.kind = parse_lm_kind(kind);
    c.ngram_order = ngram_order;
    c.smoothing_alpha = smoothing;
    c.endpoint_url = endpoint;
    c.model_name = model;
    c.timeout_ms = timeout_ms;
    c.max_retries = max_retries;
    if (!prompt_file.empty()) c.prompt.text = io::read_file(prompt_file);
    c.prompt.natural_case = !prompt_verbatim;
    return c;
  }

  std::vector<std::vector<std::string>> training_corpus() const {
    if (corpus.empty()) throw ValidationError("--lm ngram requires --lm-corpus");
    auto lines = io::read_lines(corpus);
    bool tagged = corpus_format == "tagged";
    if (corpus_format == "auto") {
      tagged = !lines.empty();
      for (const auto& l : lines) {
        std::istringstream in(l);
        for (std::string tok; in >> tok;) tagged = tagged && tok.find('/') != std::string::npos;
      }
    } else if (corpus_format != "gloss" && corpus_format != "tagged") {
      throw ValidationError("--lm-corpus-format must be auto, gloss or tagged");
    }
    if (!tagged) return io::load_gloss_corpus(corpus);
    std::vector<std::vector<std::string>> out;
    for (const auto& s : io::load_tagged_corpus(corpus)) out.push_back(pseudo_gloss(s));
    return out;
  }

  std::unique_ptr<TransitionModel> build() const {
    const LmBackendConfig cfg = config();
    return make_transition_model(cfg, cfg.kind == LmKind::NGRAM ? training_corpus()
                                                                : std::vector<std::vector<std::string>>{});
  }

  json echo() const {
    return {{"kind", kind},       {"ngram_order", ngram_order}, {"smoothing", smoothing},
            {"corpus", corpus},   {"endpoint", endpoint},       {"model", model},
            {"timeout_ms", timeout_ms}, {"max_retries", max_retries}};
  }
};

struct SynthArgs {
  std::string corpus;
  std::string freq = "data/demo/frequency.txt";
  std::string lexicon = "data/demo/sign_lexicon.txt";
  std::size_t vocab_size = 1500;
  double wr = 0.0;
  int dc = 0;
  std::uint64_t seed = 0;
  std::string wr_mode = "shift";
  double dc_boost = 0.1;
  std::string embeddings;
  std::size_t embed_dim = 512;

  NoiseConfig noise() const {
    NoiseConfig n;
    n.wr_rate = wr;
    n.dc_count = dc;
    n.seed = seed;
    n.wr_mode = parse_replacement_mode(wr_mode);
    n.dc_boost = dc_boost;
    return n;
  }

  std::unique_ptr<WordEmbedder> embedder() const {
    if (!embeddings.empty()) return std::make_unique<VectorFileEmbedder>(VectorFileEmbedder::load(embeddings));
    return std::make_unique<TrigramEmbedder>(embed_dim);
  }

  Vocabulary vocab(std::size_t size) const {
    return build_vocab(io::read_lines(freq), io::load_word_set(lexicon), size);
  }
};

json spot_echo(const SpotArgs& a) {
  return {{"strategy", a.strategy},     {"alpha_s", a.alpha_s},   {"alpha_s_rh", a.alpha_s_rh},
          {"alpha_late", a.alpha_late}, {"alpha_ens", a.alpha_ens}, {"rescale", a.rescale},
          {"resample", a.resample},     {"dtw_normalize", a.dtw_normalize}};
}

json decode_echo(const DecodeArgs& a) {
  return {{"top_k", a.top_k},
          {"beam_width", a.beam_width},
          {"alpha_bs", a.alpha_bs},
          {"temperature", a.temperature},
          {"context_window", a.context_window}};
}

void add_spot_options(CLI::App* cmd, SpotArgs& a) {
  cmd->add_option("--strategy", a.strategy, "I3D_ONLY, RH_ONLY, LATE, MID or ENSEMBLE")->capture_default_str();
  cmd->add_option("--alpha-s", a.alpha_s, "DTW/cosine weight for I3D features")->capture_default_str();
  cmd->add_option("--alpha-s-rh", a.alpha_s_rh, "DTW/cosine weight for RH features")->capture_default_str();
  cmd->add_option("--alpha-late", a.alpha_late, "late fusion weight on I3D")->capture_default_str();
  cmd->add_option("--alpha-ens", a.alpha_ens, "ensemble weight on MID")->capture_default_str();
  cmd->add_flag("--rescale", a.rescale, "min-max rescale distributions before fusion");
  cmd->add_flag("--resample", a.resample, "resample RH/LH to the I3D frame count for MID");
  cmd->add_flag("--dtw-normalize", a.dtw_normalize, "divide DTW cost by T_a + T_b");
}

void add_decode_options(CLI::App* cmd, DecodeArgs& a) {
  cmd->add_option("--top-k", a.top_k, "candidates per segment")->capture_default_str();
  cmd->add_option("--beam-width", a.beam_width, "beam width")->capture_default_str();
  cmd->add_option("--alpha-bs", a.alpha_bs, "emission weight in the beam objective")->capture_default_str();
  cmd->add_option("--temperature", a.temperature, "softmax temperature")->capture_default_str();
  cmd->add_option("--context-window", a.context_window, "LM context length (0 = full prefix)")
      ->capture_default_str();
}

void add_lm_options(CLI::App* cmd, LmArgs& a) {
  cmd->add_option("--lm", a.kind, "uniform, ngram or remote")->capture_default_str();
  cmd->add_option("--ngram-order", a.ngram_order, "n-gram order")->capture_default_str();
  cmd->add_option("--smoothing", a.smoothing, "add-alpha smoothing constant")->capture_default_str();
  cmd->add_option("--lm-corpus", a.corpus, "n-gram training corpus (gloss lines or word/TAG lines)");
  cmd->add_option("--lm-corpus-format", a.corpus_format, "auto, gloss or tagged")->capture_default_str();
  cmd->add_option("--endpoint", a.endpoint, "remote logprob endpoint URL");
  cmd->add_option("--model", a.model, "remote model name");
  cmd->add_option("--timeout-ms", a.timeout_ms, "per-request timeout")->capture_default_str();
  cmd->add_option("--max-retries", a.max_retries, "retries per request")->capture_default_str();
  cmd->add_option("--prompt-template", a.prompt_file, "file with {CONTEXT} and {CANDIDATES} placeholders");
  cmd->add_flag("--prompt-verbatim", a.prompt_verbatim, "render glosses in the prompt without recasing");
}

void add_synth_options(CLI::App* cmd, SynthArgs& a) {
  cmd->add_option("--corpus", a.corpus, "tagged corpus, one word/TAG sentence per line")->required();
  cmd->add_option("--freq", a.freq, "word frequency list")->capture_default_str();
  cmd->add_option("--lexicon", a.lexicon, "sign lexicon word list")->capture_default_str();
  cmd->add_option("--vocab-size", a.vocab_size, "vocabulary size")->capture_default_str();
  cmd->add_option("--wr", a.wr, "word replacement rate in [0,1]")->capture_default_str();
  cmd->add_option("--dc", a.dc, "distribution corruption count")->capture_default_str();
  cmd->add_option("--seed", a.seed, "noise seed")->capture_default_str();
  cmd->add_option("--wr-mode", a.wr_mode, "shift, swap or last")->capture_default_str();
  cmd->add_option("--dc-boost", a.dc_boost, "maximum corruption boost")->capture_default_str();
  cmd->add_option("--embeddings", a.embeddings, "word-vector text file (default: trigram hashing)");
  cmd->add_option("--embed-dim", a.embed_dim, "trigram embedder width")->capture_default_str();
}

std::vector<double> parse_values(const std::string& spec) {
  if (spec.empty()) return unit_grid();
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    double lo, hi, step;
    char c1, c2;
    std::istringstream in(spec);
    if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0.0) || hi < lo)
      throw ValidationError("--values range must look like start:stop:step");
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
  }
  std::istringstream in(spec);
  for (std::string item; std::getline(in, item, ',');) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ValidationError("bad sweep value '" + item + "'");
    }
  }
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + v[i];
  return out;
}

json report_to_json(const EvalReport& r) {
  json acc = json::object();
  for (const auto& [k, v] : r.topk_accuracy) acc[std::to_string(k)] = v;
  json per = json::array();
  for (const auto& s : r.per_sentence)
    per.push_back({{"reference", s.reference}, {"hypothesis", s.hypothesis}, {"wer", s.wer},
                   {"oracle_wer", s.oracle_wer}});
  return {{"wer_top1", r.wer_top1}, {"wer_top5", r.wer_top5}, {"topk_accuracy", acc},
          {"sentence_count", r.sentence_count}, {"per_sentence", per}};
}

json sweep_to_json(const SweepGrid& g, const json& config) {
  json rows = json::array();
  for (const auto& r : g.rows) rows.push_back({{"value", r.value}, {"top1", r.top1}, {"top5", r.top5}});
  return {{"format", io::kSweepFormat}, {"parameter", g.parameter}, {"metric", g.metric},
          {"values", g.values},         {"rows", rows},            {"config", config}};
}

// --- commands ---------------------------------------------------------------

int cmd_dict_build(const std::string& manifest, const std::string& mods, bool resample,
                   const std::string& out) {
  std::set<Modality> config;
  std::istringstream in(mods);
  for (std::string m; std::getline(in, m, ',');) config.insert(parse_modality(m));
  Dictionary dict = build_dictionary(io::load_manifest(manifest), config, DictionaryOptions{resample});
  io::write_document(out, io::dictionary_to_json(dict));
  std::cout << "V=" << dict.vocab_size() << " modalities=";
  for (std::size_t i = 0; i < dict.modalities().size(); ++i) {
    const Modality m = dict.modalities()[i];
    std::cout << (i ? "," : "") << to_string(m) << ":" << dict.dim(m);
  }
  std::cout << "\n";
  return kOk;
}

int cmd_spot(const std::string& segments, const std::string& dict_path, const SpotArgs& spot,
             int preview_k, unsigned threads, const std::string& out) {
  const Dictionary dict = io::load_dictionary(dict_path);
  const FusionConfig cfg = spot.config(1);
  for (Modality m : required_modalities(cfg.strategy)) {
    if (!dict.has_modality(m))
      throw ValidationError("strategy " + std::string(to_string(cfg.strategy)) + " needs " +
                            std::string(to_string(m)) + " features in the dictionary");
  }
  DistributionCorpus corpus = spot_corpus(io::load_segments(segments), dict, cfg, threads);
  corpus.meta = {{"config", spot_echo(spot)}};
  io::write_document(out, io::distributions_to_json(corpus, preview_k));
  for (const auto& s : corpus.sentences) {
    std::vector<std::string> best;
    for (const auto& d : s.segments) best.push_back(corpus.vocab[d.argmax()]);
    std::cout << s.id << "\t" << join(best) << "\n";
  }
  return kOk;
}

int cmd_disambiguate(const std::string& dists_path, const DecodeArgs& dec, const LmArgs& lm_args,
                     unsigned threads, const std::string& out) {
  const DistributionCorpus corpus = io::load_distributions(dists_path);
  const auto lm = lm_args.build();
  const auto hyps = decode_corpus(corpus, *lm, dec.config(), threads);
  const json meta = {{"decoder", decode_echo(dec)},
                     {"lm", lm_args.echo()},
                     {"deterministic", lm->deterministic()},
                     {"source_meta", corpus.meta}};
  io::write_document(out, io::hypotheses_to_json(hyps, meta));
  for (const auto& h : hyps) std::cout << join(h.hypotheses.front().glosses) << "\n";
  return kOk;
}

int cmd_synth(const SynthArgs& a, unsigned threads, const std::string& out) {
  const auto embedder = a.embedder();
  const EmbeddedVocabulary vocab(a.vocab(a.vocab_size), *embedder);
  SynthStats st;
  DistributionCorpus corpus = synthesize(io::load_tagged_corpus(a.corpus), vocab, a.noise(), &st, threads);
  corpus.meta["embedder"] = embedder->name();
  io::write_document(out, io::distributions_to_json(corpus));
  std::cout << "sentences=" << st.sentences_out << "/" << st.sentences_in << " tokens=" << st.tokens
            << " oov=" << st.oov_tokens << " empty=" << st.empty_sentences << " seed=" << a.seed << "\n";
  return kOk;
}

int cmd_eval(const std::string& hyps_path, const std::string& dists_path, int oracle_n,
             const std::vector<int>& ks, const std::string& out) {
  if (hyps_path.empty() && dists_path.empty())
    throw ValidationError("eval needs --hypotheses and/or --distributions");
  EvalReport report;
  json echo = {{"oracle_n", oracle_n}};
  if (!dists_path.empty()) {
    const auto corpus = io::load_distributions(dists_path);
    report.topk_accuracy = corpus_topk_accuracy(corpus, ks);
    echo["distributions"] = dists_path;
    echo["source_meta"] = corpus.meta;
    if (hyps_path.empty()) report = [&] {
      EvalReport r = evaluate_corpus(argmax_corpus(corpus), 1);
      r.topk_accuracy = report.topk_accuracy;
      return r;
    }();
  }
  if (!hyps_path.empty()) {
    const auto hyps = io::load_hypotheses(hyps_path);
    auto acc = report.topk_accuracy;
    report = evaluate_corpus(hyps, oracle_n);
    report.topk_accuracy = acc;
    echo["hypotheses"] = hyps_path;
    if (!dists_path.empty()) {
      const auto corpus = io::load_distributions(dists_path);
      if (corpus.sentences.size() != hyps.size())
        throw ValidationError("eval: " + std::to_string(hyps.size()) + " hypothesis sentences vs " +
                              std::to_string(corpus.sentences.size()) + " distribution sentences");
    }
  }
  json doc = {{"format", io::kReportFormat}, {"config", echo}, {"metrics", report_to_json(report)}};
  io::write_document(out, doc);
  std::printf("sentences=%zu wer_top1=%.4f wer_top%d=%.4f", report.sentence_count, report.wer_top1, oracle_n,
              report.wer_top5);
  for (const auto& [k, v] : report.topk_accuracy) std::printf(" acc@%d=%.4f", k, v);
  std::printf("\n");
  return kOk;
}

int cmd_sweep(const std::string& param, const std::string& values, const std::string& segments,
              const std::string& dict_path, const SpotArgs& spot, const SynthArgs& synth,
              const DecodeArgs& dec, const LmArgs& lm_args, unsigned threads, const std::string& out) {
  SweepGrid grid;
  grid.parameter = param;
  grid.values = parse_values(values);
  json config = {{"spot", spot_echo(spot)}, {"decoder", decode_echo(dec)}, {"lm", lm_args.echo()}};

  const std::set<std::string> spot_params{"alpha_s", "alpha_s_rh", "alpha_late", "alpha_ens"};
  const std::set<std::string> synth_params{"wr", "dc", "vocab_size", "alpha_bs", "beam_width", "top_k",
                                           "temperature"};
  std::optional<SweepGrid> filled;
  try {
    if (spot_params.count(param)) {
      if (segments.empty() || dict_path.empty())
        throw ValidationError("sweep over " + param + " needs --segments and --dict");
      const Dictionary dict = io::load_dictionary(dict_path);
      const auto sentences = io::load_segments(segments);
      grid.metric = "accuracy";
      filled = run_sweep(grid, [&](double v) {
        FusionConfig cfg = spot.config(1);
        if (param == "alpha_s") cfg.alpha_s_i3d = v;
        if (param == "alpha_s_rh") cfg.alpha_s_rh = v;
        if (param == "alpha_late") {
          cfg.alpha_late = v;
          cfg.strategy = FusionStrategy::LATE;
        }
        if (param == "alpha_ens") {
          cfg.alpha_ens = v;
          cfg.strategy = FusionStrategy::ENSEMBLE;
        }
        const auto acc = corpus_topk_accuracy(spot_corpus(sentences, dict, cfg, threads), {1, 5});
        return std::pair{acc.at(1), acc.at(5)};
      });
    } else if (synth_params.count(param)) {
      if (synth.corpus.empty()) throw ValidationError("sweep over " + param + " needs --corpus");
      grid.metric = "wer";
      const auto embedder = synth.embedder();
      const auto tagged = io::load_tagged_corpus(synth.corpus);
      const auto lm = lm_args.build();
      config["synth"] = {{"corpus", synth.corpus}, {"vocab_size", synth.vocab_size}, {"wr", synth.wr},
                         {"dc", synth.dc},         {"seed", synth.seed},             {"wr_mode", synth.wr_mode}};
      filled = run_sweep(grid, [&](double v) {
        SynthArgs s = synth;
        DecodeArgs d = dec;
        if (param == "wr") s.wr = v;
        if (param == "dc") s.dc = static_cast<int>(std::lround(v));
        if (param == "vocab_size") s.vocab_size = static_cast<std::size_t>(std::lround(v));
        if (param == "alpha_bs") d.alpha_bs = v;
        if (param == "beam_width") d.beam_width = static_cast<int>(std::lround(v));
        if (param == "top_k") d.top_k = static_cast<int>(std::lround(v));
        if (param == "temperature") d.temperature = v;
        const EmbeddedVocabulary vocab(s.vocab(s.vocab_size), *embedder);
        const auto corpus = synthesize(tagged, vocab, s.noise(), nullptr, threads);
        const auto report = evaluate_corpus(decode_corpus(corpus, *lm, d.config(), threads), 5);
        return std::pair{report.wer_top1, report.wer_top5};
      });
    } else {
      throw ValidationError("unknown sweep parameter '" + param + "'");
    }
  } catch (const SweepAborted& e) {
    io::write_document(out, sweep_to_json(e.partial(), config));
    throw;
  }
  io::write_document(out, sweep_to_json(*filled, config));
  std::cout << render_table(*filled);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"signspot: dictionary sign spotting with language-model disambiguation"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML/INI file with option values");
  unsigned threads = 1;
  app.add_option("--threads", threads, "worker threads (0 = all cores)")->capture_default_str();

  std::string out;
  SpotArgs spot;
  DecodeArgs dec;
  LmArgs lm;
  SynthArgs synth;

  std::string manifest, modalities = "I3D,RH";
  bool resample = false;
  auto* dict_cmd = app.add_subcommand("dict-build", "validate a manifest and write a dictionary archive");
  dict_cmd->add_option("--manifest", manifest, "dictionary manifest")->required();
  dict_cmd->add_option("--modalities", modalities, "comma-separated modality list")->capture_default_str();
  dict_cmd->add_flag("--resample", resample, "resample RH/LH to the I3D frame count for MID");
  dict_cmd->add_option("--out", out, "output archive (.json or .json.gz)")->required();

  std::string segments, dict_path;
  int preview_k = 10;
  auto* spot_cmd = app.add_subcommand("spot", "score segments against a dictionary");
  spot_cmd->add_option("--segments", segments, "segments document")->required();
  spot_cmd->add_option("--dict", dict_path, "dictionary archive")->required();
  spot_cmd->add_option("--top-k", preview_k, "candidates previewed per segment")->capture_default_str();
  spot_cmd->add_option("--out", out, "distributions output")->required();
  add_spot_options(spot_cmd, spot);

  std::string dists_path;
  auto* dis_cmd = app.add_subcommand("disambiguate", "beam-search gloss sequences with an LM");
  dis_cmd->add_option("--distributions", dists_path, "distributions document")->required();
  dis_cmd->add_option("--out", out, "hypotheses output")->required();
  add_decode_options(dis_cmd, dec);
  add_lm_options(dis_cmd, lm);

  auto* synth_cmd = app.add_subcommand("synth", "generate noisy synthetic distributions");
  synth_cmd->add_option("--out", out, "distributions output")->required();
  add_synth_options(synth_cmd, synth);

  std::string hyps_path;
  int oracle_n = 5;
  std::vector<int> ks{1, 5, 10};
  auto* eval_cmd = app.add_subcommand("eval", "WER and Top-k accuracy report");
  eval_cmd->add_option("--hypotheses", hyps_path, "hypotheses document");
  eval_cmd->add_option("--distributions", dists_path, "distributions document");
  eval_cmd->add_option("--oracle-n", oracle_n, "hypotheses considered for Top-n WER")->capture_default_str();
  eval_cmd->add_option("--k", ks, "Top-k accuracy cutoffs")->delimiter(',')->capture_default_str();
  eval_cmd->add_option("--out", out, "report output")->required();

  std::string param, values;
  auto* sweep_cmd = app.add_subcommand("sweep", "run the pipeline once per grid value");
  sweep_cmd->add_option("--param", param,
                        "alpha_s, alpha_s_rh, alpha_late, alpha_ens (feature data) or "
                        "wr, dc, vocab_size, alpha_bs, beam_width, top_k, temperature (synthetic)")
      ->required();
  sweep_cmd->add_option("--values", values, "comma list or start:stop:step (default 0:1:0.1)");
  sweep_cmd->add_option("--segments", segments, "segments document (feature sweeps)");
  sweep_cmd->add_option("--dict", dict_path, "dictionary archive (feature sweeps)");
  sweep_cmd->add_option("--out", out, "sweep output")->required();
  add_spot_options(sweep_cmd, spot);
  add_decode_options(sweep_cmd, dec);
  add_lm_options(sweep_cmd, lm);
  sweep_cmd->add_option("--corpus", synth.corpus, "tagged corpus (synthetic sweeps)");
  sweep_cmd->add_option("--freq", synth.freq, "word frequency list")->capture_default_str();
  sweep_cmd->add_option("--lexicon", synth.lexicon, "sign lexicon word list")->capture_default_str();
  sweep_cmd->add_option("--vocab-size", synth.vocab_size, "vocabulary size")->capture_default_str();
  sweep_cmd->add_option("--wr", synth.wr, "word replacement rate")->capture_default_str();
  sweep_cmd->add_option("--dc", synth.dc, "distribution corruption count")->capture_default_str();
  sweep_cmd->add_option("--seed", synth.seed, "noise seed")->capture_default_str();
  sweep_cmd->add_option("--wr-mode", synth.wr_mode, "shift, swap or last")->capture_default_str();
  sweep_cmd->add_option("--embeddings", synth.embeddings, "word-vector text file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    if (*dict_cmd) return cmd_dict_build(manifest, modalities, resample, out);
    if (*spot_cmd) return cmd_spot(segments, dict_path, spot, preview_k, threads, out);
    if (*dis_cmd) return cmd_disambiguate(dists_path, dec, lm, threads, out);
    if (*synth_cmd) return cmd_synth(synth, threads, out);
    if (*eval_cmd) return cmd_eval(hyps_path, dists_path, oracle_n, ks, out);
    if (*sweep_cmd) return cmd_sweep(param, values, segments, dict_path, spot, synth, dec, lm, threads, out);
  } catch (const TransportError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kTransport;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const SweepAborted& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
