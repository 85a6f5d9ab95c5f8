#include <gtest/gtest.h>

#include <algorithm>

#include "support/fixtures.hpp"

using namespace signspot;

namespace {

SimilarityDistribution random_dist(std::mt19937_64& g, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SimilarityDistribution d;
  for (std::size_t i = 0; i < n; ++i) d.scores.push_back(u(g));
  return d;
}

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST(BuildVocab, IntersectionInFrequencyOrder) {
  const auto v = build_vocab({"a", "b", "c", "d"}, {"b", "d"}, 2);
  EXPECT_EQ(v.words(), (std::vector<std::string>{"b", "d"}));
  EXPECT_EQ(v.glosses(), (std::vector<std::string>{"B", "D"}));
  EXPECT_THROW(build_vocab({"a", "b"}, {"a", "b"}, 3), ValidationError);
  EXPECT_THROW(build_vocab({"a"}, {"a"}, 0), ValidationError);
  EXPECT_EQ(build_vocab({"Dog", "dog", "cat"}, {"DOG", "cat"}, 2).words(), (std::vector<std::string>{"dog", "cat"}));
}

TEST(BuildVocab, BundledListsGive1500UniqueWords) {
  const auto v = fixtures::demo_vocab(1500);
  EXPECT_EQ(v.size(), 1500u);
  std::set<std::string> uniq(v.words().begin(), v.words().end());
  EXPECT_EQ(uniq.size(), 1500u);
  // Every size the sweeps use is available; the full intersection is 4373.
  for (std::size_t n : {1500u, 2000u, 3000u, 4373u}) EXPECT_EQ(fixtures::demo_vocab(n).size(), n);
  EXPECT_THROW(fixtures::demo_vocab(4374), ValidationError);
}

TEST(PseudoGloss, KeepsContentTags) {
  const auto s = parse_tagged_sentence("I/PRON love/VERB walking/VERB on/ADP a/DET Sunday/PROPN afternoon/NOUN");
  EXPECT_EQ(pseudo_gloss(s), (std::vector<std::string>{"I", "LOVE", "WALKING", "SUNDAY", "AFTERNOON"}));
  EXPECT_TRUE(pseudo_gloss(parse_tagged_sentence("the/DET a/DET")).empty());
  EXPECT_EQ(pseudo_gloss(parse_tagged_sentence("five/NUM dogs/NOUN")), (std::vector<std::string>{"FIVE", "DOGS"}));
  EXPECT_EQ(pseudo_gloss(parse_tagged_sentence("and/or/CCONJ big/ADJ")), (std::vector<std::string>{"BIG"}));
}

TEST(PseudoGloss, ParserErrors) {
  EXPECT_THROW(parse_tagged_sentence("plain words"), ValidationError);
  EXPECT_THROW(parse_tagged_sentence("dog/ANIMAL"), ValidationError);
  EXPECT_THROW(parse_tagged_sentence("   "), ValidationError);
  EXPECT_THROW(parse_tagged_sentence("/NOUN"), ValidationError);
}

TEST(TrigramEmbedder, MatchesTrigramCountOracle) {
  const TrigramEmbedder e(64);
  const auto v = e.embed("Banana");
  // "<banana>" has trigrams <ba ban ana nan ana na> : "ana" twice.
  std::map<std::size_t, double> counts;
  for (std::string t : {"<ba", "ban", "ana", "nan", "ana", "na>"}) counts[TrigramEmbedder::fnv1a(t) % 64] += 1.0;
  double n = 0.0;
  for (auto& [k, c] : counts) n += c * c;
  n = std::sqrt(n);
  for (std::size_t i = 0; i < 64; ++i) {
    const double want = counts.count(i) ? counts[i] / n : 0.0;
    EXPECT_NEAR(v[i], want, 1e-15);
  }
  EXPECT_EQ(e.embed("banana"), v);
}

TEST(VectorFileEmbedder, LoadsTextVectors) {
  fixtures::TempDir tmp("vec");
  io::write_file_atomic(tmp / "v.vec", "3 2\ndog 1 0\ncat 0.9 0.1\nCar 0 1\n");
  const auto e = VectorFileEmbedder::load((tmp / "v.vec").string());
  EXPECT_EQ(e.dim(), 2u);
  EXPECT_EQ(e.embed("car"), (std::vector<double>{0, 1}));
  EXPECT_THROW(e.embed("zebra"), ValidationError);
  const EmbeddedVocabulary ev(Vocabulary({"dog", "cat", "car"}), e);
  const auto d = ev.clean_distribution("dog");
  EXPECT_EQ(d.argmax(), 0u);
  EXPECT_GT(d.scores[1], d.scores[2]);

  io::write_file_atomic(tmp / "bad.vec", "dog 1 0\ncat 1\n");
  EXPECT_THROW(VectorFileEmbedder::load((tmp / "bad.vec").string()), ValidationError);
  EXPECT_THROW(VectorFileEmbedder::load((tmp / "missing.vec").string()), IoError);
}

TEST(CleanDistribution, TargetFirstWithScoreOne) {
  const TrigramEmbedder e;
  const Vocabulary v({"dog", "dogs", "cat", "hotdog"});
  const auto d = clean_distribution("dog", v, e);
  EXPECT_EQ(d.argmax(), 0u);
  EXPECT_EQ(d.scores[0], 1.0);
  EXPECT_EQ(d.source, SourceTag::SYNTH);
  EXPECT_EQ(clean_distribution("x", Vocabulary({"x"}), e).scores, std::vector<double>{1.0});
  EXPECT_THROW(clean_distribution("zebra", v, e), ValidationError);
}

TEST(CleanDistribution, EveryDemoWordRanksFirst) {
  const TrigramEmbedder e;
  const EmbeddedVocabulary ev(fixtures::demo_vocab(1500), e);
  for (std::size_t i = 0; i < ev.vocab().size(); i += 7) {
    const auto d = ev.clean_distribution(ev.vocab()[i]);
    EXPECT_EQ(target_rank(d, i), 0u) << ev.vocab()[i];
  }
}

TEST(WordReplacement, ZeroRateIsIdentity) {
  std::mt19937_64 g(1);
  StreamRng rng(1);
  NoiseConfig cfg;
  for (int t = 0; t < 20; ++t) {
    const auto d = random_dist(g, 30);
    EXPECT_EQ(word_replacement(d, cfg, rng).scores, d.scores);
  }
}

TEST(WordReplacement, TwoWordVocabularyAlwaysFlips) {
  for (auto mode : {ReplacementMode::SHIFT, ReplacementMode::SWAP, ReplacementMode::DEMOTE_LAST}) {
    NoiseConfig cfg;
    cfg.wr_rate = 1.0;
    cfg.wr_mode = mode;
    StreamRng rng(3);
    for (int t = 0; t < 20; ++t) {
      const auto out = word_replacement({{0.9, 0.2}}, cfg, rng);
      EXPECT_EQ(out.argmax(), 1u);
      EXPECT_EQ(sorted(out.scores), (std::vector<double>{0.2, 0.9}));
    }
  }
}

TEST(WordReplacement, ModesPlaceFormerTopAsDocumented) {
  std::mt19937_64 g(4);
  for (auto mode : {ReplacementMode::SHIFT, ReplacementMode::SWAP, ReplacementMode::DEMOTE_LAST}) {
    NoiseConfig cfg;
    cfg.wr_rate = 1.0;
    cfg.wr_mode = mode;
    StreamRng rng(5);
    for (int t = 0; t < 200; ++t) {
      const auto d = random_dist(g, 12);
      const std::size_t top = d.argmax();
      const auto out = word_replacement(d, cfg, rng);
      EXPECT_EQ(sorted(out.scores), sorted(d.scores));
      EXPECT_NE(out.argmax(), top);
      const std::size_t rank = fixtures::sorted_rank(out.scores, top);
      if (mode == ReplacementMode::SHIFT) {
        EXPECT_EQ(rank, 1u);
      }
      if (mode == ReplacementMode::DEMOTE_LAST) {
        EXPECT_EQ(rank, 11u);
      }
      if (mode == ReplacementMode::SWAP) {
        // Exactly two entries move.
        std::size_t moved = 0;
        for (std::size_t i = 0; i < 12; ++i) moved += out.scores[i] != d.scores[i];
        EXPECT_EQ(moved, 2u);
      }
      if (mode == ReplacementMode::SHIFT) {
        // Relative order of all other entries is preserved.
        const std::size_t promoted = out.argmax();
        for (std::size_t i = 0; i < 12; ++i)
          for (std::size_t j = 0; j < 12; ++j)
            if (i != promoted && j != promoted && d.scores[i] > d.scores[j]) {
              EXPECT_GT(out.scores[i], out.scores[j]);
            }
      }
    }
  }
}

TEST(WordReplacement, MonteCarloRate) {
  std::mt19937_64 g(6);
  NoiseConfig cfg;
  cfg.wr_rate = 0.5;
  StreamRng rng(2024);
  int replaced = 0;
  const int trials = 10000;
  const auto d = random_dist(g, 20);
  for (int t = 0; t < trials; ++t) replaced += word_replacement(d, cfg, rng).argmax() != d.argmax();
  EXPECT_NEAR(static_cast<double>(replaced) / trials, 0.5, 0.02);
}

TEST(WordReplacement, PickedRankIsUniform) {
  NoiseConfig cfg;
  cfg.wr_rate = 1.0;
  StreamRng rng(77);
  SimilarityDistribution d{{10, 9, 8, 7, 6}};
  std::vector<int> hits(5, 0);
  for (int t = 0; t < 8000; ++t) ++hits[word_replacement(d, cfg, rng).argmax()];
  EXPECT_EQ(hits[0], 0);
  for (int r = 1; r < 5; ++r) EXPECT_NEAR(hits[r] / 8000.0, 0.25, 0.02);
}

TEST(DistributionCorruption, ContractOverRandomInputs) {
  std::mt19937_64 g(8);
  for (int m : {0, 1, 5, 10, 30}) {
    NoiseConfig cfg;
    cfg.dc_count = m;
    StreamRng rng(9, static_cast<std::uint64_t>(m));
    for (int t = 0; t < 100; ++t) {
      const auto d = random_dist(g, 100);
      const std::size_t target = static_cast<std::size_t>(t) % 100;
      const auto out = distribution_corruption(d, target, cfg, rng);
      const double prev_max = *std::max_element(d.scores.begin(), d.scores.end());
      int above = 0, changed = 0;
      for (std::size_t i = 0; i < 100; ++i) {
        above += out.scores[i] > prev_max;
        changed += out.scores[i] != d.scores[i];
        if (out.scores[i] != d.scores[i]) {
          EXPECT_LE(out.scores[i], prev_max + cfg.dc_boost);
        }
      }
      EXPECT_EQ(above, m);
      EXPECT_EQ(changed, m);
      EXPECT_EQ(out.scores[target], d.scores[target]);
    }
  }
}

TEST(DistributionCorruption, DrawsFromLeastSimilarHalf) {
  NoiseConfig cfg;
  cfg.dc_count = 5;
  StreamRng rng(10);
  SimilarityDistribution d;
  for (int i = 0; i < 40; ++i) d.scores.push_back(40 - i);  // index 0 most similar
  for (int t = 0; t < 200; ++t) {
    const auto out = distribution_corruption(d, 0, cfg, rng);
    for (std::size_t i = 0; i < 40; ++i)
      if (out.scores[i] != d.scores[i]) {
        EXPECT_GE(i, 20u);
      }
  }
}

TEST(DistributionCorruption, PushesTargetOutOfTopK) {
  const TrigramEmbedder e;
  const EmbeddedVocabulary ev(fixtures::demo_vocab(1500), e);
  NoiseConfig cfg;
  cfg.dc_count = 5;
  StreamRng rng(11);
  DecoderConfig k5, k6;
  k5.top_k = 5;
  k6.top_k = 6;
  const auto glosses = ev.vocab().glosses();
  for (std::size_t i = 0; i < 1500; i += 50) {
    const auto d = distribution_corruption(ev.clean_distribution(ev.vocab()[i]), i, cfg, rng);
    auto has = [&](const CandidateSet& s) {
      return std::any_of(s.candidates.begin(), s.candidates.end(), [&](const Candidate& c) { return c.index == i; });
    };
    EXPECT_FALSE(has(normalize_and_topk(d, glosses, k5)));
    EXPECT_TRUE(has(normalize_and_topk(d, glosses, k6)));
  }
}

TEST(DistributionCorruption, Errors) {
  NoiseConfig cfg;
  cfg.dc_count = 3;
  StreamRng rng(1);
  EXPECT_THROW(distribution_corruption({{1, 2, 3}}, 0, cfg, rng), ValidationError);
  EXPECT_THROW(distribution_corruption({{1, 2, 3, 4}}, 9, cfg, rng), ValidationError);
  cfg.dc_count = -1;
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(StreamRng, DeterministicAndStreamIndependent) {
  StreamRng a(42, 3), b(42, 3), c(42, 4);
  std::vector<std::uint64_t> xa, xb, xc;
  for (int i = 0; i < 10; ++i) {
    xa.push_back(a.next_u64());
    xb.push_back(b.next_u64());
    xc.push_back(c.next_u64());
  }
  EXPECT_EQ(xa, xb);
  EXPECT_NE(xa, xc);
  StreamRng r(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform01();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(r.uniform_below(7), 7u);
  }
}

TEST(Synthesize, CleanCorpusIsPerfect) {
  const TrigramEmbedder e;
  const EmbeddedVocabulary ev(fixtures::demo_vocab(1500), e);
  auto corpus = fixtures::demo_corpus();
  corpus.resize(40);
  SynthStats st;
  const auto out = synthesize(corpus, ev, NoiseConfig{}, &st);
  EXPECT_EQ(st.sentences_in, 40u);
  EXPECT_EQ(st.oov_tokens, 0u);
  for (const auto& s : out.sentences) {
    ASSERT_EQ(s.reference.size(), s.segments.size());
    for (std::size_t x = 0; x < s.segments.size(); ++x) {
      EXPECT_EQ(out.vocab[s.segments[x].argmax()], s.reference[x]);
      EXPECT_EQ(s.targets[x], s.segments[x].argmax());
    }
  }
}

TEST(Synthesize, DropsOovAndEmptySentences) {
  const TrigramEmbedder e;
  const EmbeddedVocabulary ev(Vocabulary({"dog", "run"}), e);
  const std::vector<TaggedSentence> corpus{parse_tagged_sentence("dog/NOUN zebra/NOUN run/VERB"),
                                           parse_tagged_sentence("the/DET"),
                                           parse_tagged_sentence("zebra/NOUN")};
  SynthStats st;
  const auto out = synthesize(corpus, ev, NoiseConfig{}, &st);
  EXPECT_EQ(st.sentences_out, 1u);
  EXPECT_EQ(st.empty_sentences, 2u);
  EXPECT_EQ(st.tokens, 4u);
  EXPECT_EQ(st.oov_tokens, 2u);
  EXPECT_EQ(out.sentences[0].reference, (std::vector<std::string>{"DOG", "RUN"}));
  EXPECT_EQ(out.sentences[0].id, "s0");
}

TEST(Synthesize, DeterministicAcrossThreadCounts) {
  const TrigramEmbedder e;
  const EmbeddedVocabulary ev(fixtures::demo_vocab(1500), e);
  auto corpus = fixtures::demo_corpus();
  corpus.resize(30);
  NoiseConfig cfg;
  cfg.wr_rate = 0.5;
  cfg.dc_count = 5;
  cfg.seed = 99;
  const auto a = io::distributions_to_json(synthesize(corpus, ev, cfg, nullptr, 1)).dump();
  const auto b = io::distributions_to_json(synthesize(corpus, ev, cfg, nullptr, 3)).dump();
  EXPECT_EQ(a, b);
  cfg.seed = 100;
  EXPECT_NE(a, io::distributions_to_json(synthesize(corpus, ev, cfg)).dump());
}

TEST(Synthesize, FullReplacementNeverLeavesReferenceFirst) {
  const TrigramEmbedder e;
  const EmbeddedVocabulary ev(fixtures::demo_vocab(1500), e);
  auto corpus = fixtures::demo_corpus();
  corpus.resize(30);
  NoiseConfig cfg;
  cfg.wr_rate = 1.0;
  cfg.seed = 5;
  const auto out = synthesize(corpus, ev, cfg);
  for (const auto& s : out.sentences)
    for (std::size_t x = 0; x < s.segments.size(); ++x) EXPECT_NE(out.vocab[s.segments[x].argmax()], s.reference[x]);
}
