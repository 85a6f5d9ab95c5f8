// Spots three hand-made signs in a query segment with each fusion strategy.
//
//   ./spot_words

#include <cstdio>

#include "signspot/signspot.hpp"

using namespace signspot;

namespace {

FeatureSequence seq(std::vector<std::vector<double>> frames, Modality m) {
  return FeatureSequence::from_frames(frames, m);
}

}  // namespace

int main() {
  std::vector<DictionaryEntry> entries{
      {"HELLO", {{Modality::I3D, seq({{0, 0}, {1, 0}, {2, 0}}, Modality::I3D)},
                 {Modality::RH, seq({{0, 1}, {0, 2}}, Modality::RH)}}},
      {"THANK-YOU", {{Modality::I3D, seq({{0, 2}, {0, 1}, {0, 0}}, Modality::I3D)},
                     {Modality::RH, seq({{1, 1}, {2, 2}}, Modality::RH)}}},
      {"GOOD", {{Modality::I3D, seq({{2, 2}, {2, 2}}, Modality::I3D)},
                {Modality::RH, seq({{0, 1}, {0, 3}}, Modality::RH)}}},
  };
  const Dictionary dict = build_dictionary(entries, {Modality::I3D, Modality::RH});

  // A slower, slightly noisy HELLO.
  const Segment query{{Modality::I3D, seq({{0, 0.1}, {0.6, 0}, {1.1, 0}, {1.9, 0.1}}, Modality::I3D)},
                      {Modality::RH, seq({{0, 1.1}, {0.1, 1.6}, {0, 2.1}}, Modality::RH)}};

  for (auto s : {FusionStrategy::I3D_ONLY, FusionStrategy::RH_ONLY, FusionStrategy::LATE}) {
    FusionConfig cfg;
    cfg.strategy = s;
    const auto d = spot_segment(query, dict, cfg);
    std::printf("%-8s", std::string(to_string(s)).c_str());
    for (std::size_t i = 0; i < dict.vocab_size(); ++i) std::printf("  %s=%.3f", dict.glosses()[i].c_str(), d.scores[i]);
    std::printf("  -> %s\n", dict.glosses()[d.argmax()].c_str());
  }
}
