// Corrupts the bundled demo corpus and shows how much a bigram LM recovers.
//
//   ./noise_recovery [data_dir] [wr] [dc]

#include <cstdio>
#include <string>

#include "signspot/signspot.hpp"

using namespace signspot;

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "data/demo";
  NoiseConfig noise;
  noise.wr_rate = argc > 2 ? std::stod(argv[2]) : 1.0;
  noise.dc_count = argc > 3 ? std::stoi(argv[3]) : 5;
  noise.seed = 42;

  try {
    const Vocabulary vocab = build_vocab(io::read_lines(dir / "frequency.txt"),
                                         io::load_word_set(dir / "sign_lexicon.txt"), 1500);
    const TrigramEmbedder embedder;
    const EmbeddedVocabulary ev(vocab, embedder);
    const auto corpus = synthesize(io::load_tagged_corpus(dir / "corpus.tagged"), ev, noise);

    LmBackendConfig lm_cfg;
    lm_cfg.kind = LmKind::NGRAM;
    const auto bigram = make_transition_model(lm_cfg, references_of(corpus));
    const UniformModel uniform;
    const DecoderConfig dec;

    const auto raw = evaluate_corpus(argmax_corpus(corpus));
    const auto flat = evaluate_corpus(decode_corpus(corpus, uniform, dec));
    const auto lm = evaluate_corpus(decode_corpus(corpus, *bigram, dec));
    std::printf("WR=%.0f%% DC=%d, %zu sentences\n", noise.wr_rate * 100, noise.dc_count, corpus.sentences.size());
    std::printf("  %-12s top1=%.4f\n", "argmax", raw.wer_top1);
    std::printf("  %-12s top1=%.4f top5=%.4f\n", "uniform LM", flat.wer_top1, flat.wer_top5);
    std::printf("  %-12s top1=%.4f top5=%.4f\n", "bigram LM", lm.wer_top1, lm.wer_top5);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
