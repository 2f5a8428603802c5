#include "acceptance/fixture.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include "facedup/corpus/image.hpp"
#include "facedup/corpus/source.hpp"
#include "facedup/features/features.hpp"
#include "support/synth.hpp"

namespace fixture {

using facedup::corpus::PixelBuffer;
using facedup::features::Embedding;
using facedup::features::FeatureRecord;

namespace {

constexpr std::size_t kDim = 24;

// Unit vector with the given weights on subject axes; the remainder goes to
// a private axis so that weights are exact inner products with basis vectors.
Embedding mix(std::initializer_list<std::pair<std::size_t, double>> weights, std::size_t spare) {
  Embedding e(kDim, 0.0);
  double sq = 0;
  for (const auto& [axis, w] : weights) {
    e.at(axis) = w;
    sq += w * w;
  }
  e.at(spare) = std::sqrt(1 - sq);
  return e;
}

facedup::align::Detection face() {
  facedup::align::Detection d;
  d.x = 16;
  d.y = 16;
  d.w = 96;
  d.h = 96;
  d.confidence = 0.9;
  for (std::size_t i = 0; i < 5; ++i) {
    d.landmarks[i] = {facedup::align::kArcFaceTemplate[i].x + 8,
                      facedup::align::kArcFaceTemplate[i].y + 8};
  }
  return d;
}

}  // namespace

RuleFixture write_rule_fixture(const std::filesystem::path& dir) {
  RuleFixture fx;
  fx.root = dir / "fx";
  fx.sidecar = dir / "fx.sidecar.tsv";
  facedup::features::FeatureStore store(kDim);

  std::map<std::string, PixelBuffer> bases;
  std::uint64_t seed = 9001;
  auto base = [&](const std::string& rel) -> const PixelBuffer& {
    // Bright throughout, so the segment hash sees a single whole-frame region.
    auto img = synth::fractal(128, 128, seed++, 200, 0.4);
    facedup::corpus::write_file(fx.root / rel, facedup::corpus::encode_png(img));
    return bases[rel] = std::move(img);
  };
  auto reencode = [&](const std::string& from, const std::string& rel, int quality) {
    facedup::corpus::write_file(fx.root / rel,
                                facedup::corpus::encode_jpeg(bases.at(from), quality));
  };
  auto copy = [&](const std::string& from, const std::string& rel) {
    facedup::corpus::write_file(fx.root / rel, facedup::corpus::read_file(fx.root / from));
  };
  auto feat = [&](const std::string& rel, Embedding e, double q) {
    store.put("fx/" + rel, FeatureRecord{std::move(e), q, std::vector{face()}});
  };
  auto gallery = [&](const std::string& rel, std::size_t subject) {
    base(rel);
    feat(rel, synth::basis(kDim, subject), 55);
  };

  // s01: three byte-identical copies; the representative is the smallest
  // path even though a copy carries the higher quality.
  base("s01/01.png");
  copy("s01/01.png", "s01/02.png");
  copy("s01/01.png", "s01/03.png");
  feat("s01/01.png", synth::basis(kDim, 1), 40);
  feat("s01/02.png", synth::basis(kDim, 1), 40);
  feat("s01/03.png", synth::basis(kDim, 1), 90);
  gallery("s01/04.png", 1);

  // s02: near-duplicate pair at similarity 0.39, ejected.
  base("s02/01.png");
  reencode("s02/01.png", "s02/02.jpg", 90);
  feat("s02/01.png", synth::basis(kDim, 2), 60);
  feat("s02/02.jpg", synth::tilt(kDim, 2, 13, 0.39), 70);
  gallery("s02/03.png", 2);
  gallery("s02/04.png", 2);

  // s03: near-duplicate pair at similarity 0.40, retained; higher quality wins.
  base("s03/01.png");
  reencode("s03/01.png", "s03/02.jpg", 90);
  feat("s03/01.png", synth::basis(kDim, 3), 50);
  feat("s03/02.jpg", synth::tilt(kDim, 3, 14, 0.40), 70);
  gallery("s03/03.png", 3);
  gallery("s03/04.png", 3);

  // s04: two re-encodes share the top quality; the smaller path wins.
  base("s04/01.png");
  reencode("s04/01.png", "s04/02.jpg", 95);
  reencode("s04/01.png", "s04/03.jpg", 85);
  feat("s04/01.png", synth::basis(kDim, 4), 40);
  feat("s04/02.jpg", synth::tilt(kDim, 4, 15, 0.9), 60);
  feat("s04/03.jpg", synth::tilt(kDim, 4, 16, 0.9), 60);
  gallery("s04/04.png", 4);

  // s05/s06: cross-subject pair; means 0.75 (s06) and 0.30 (s05) move the
  // representative to s06.
  const auto p56 = mix({{5, 0.30}, {6, 0.75}}, 17);
  base("s05/01.png");
  reencode("s05/01.png", "s06/01.jpg", 90);
  feat("s05/01.png", p56, 90);
  feat("s06/01.jpg", p56, 80);
  gallery("s05/02.png", 5);
  gallery("s05/03.png", 5);
  gallery("s06/02.png", 6);
  gallery("s06/03.png", 6);
  gallery("s06/04.png", 6);

  // s07/s08: means 0.55 and 0.45, margin too small.
  const auto p78 = mix({{7, 0.55}, {8, 0.45}}, 18);
  base("s07/01.png");
  reencode("s07/01.png", "s08/01.jpg", 90);
  feat("s07/01.png", p78, 50);
  feat("s08/01.jpg", p78, 80);
  gallery("s07/02.png", 7);
  gallery("s07/03.png", 7);
  gallery("s07/04.png", 7);
  gallery("s08/02.png", 8);
  gallery("s08/03.png", 8);

  // s09/s10: s10 has no other image, so s09 is the single candidate at 0.38.
  const auto p9 = mix({{9, 0.38}}, 19);
  base("s09/01.png");
  reencode("s09/01.png", "s10/01.jpg", 90);
  feat("s09/01.png", p9, 70);
  feat("s10/01.jpg", p9, 60);
  gallery("s09/02.png", 9);
  gallery("s09/03.png", 9);

  // s11/s12: the representative already sits in the best subject.
  const auto p11 = mix({{11, 0.8}, {12, 0.1}}, 20);
  base("s11/01.png");
  reencode("s11/01.png", "s12/01.jpg", 90);
  feat("s11/01.png", p11, 90);
  feat("s12/01.jpg", p11, 50);
  gallery("s11/02.png", 11);
  gallery("s11/03.png", 11);
  gallery("s12/02.png", 12);
  gallery("s12/03.png", 12);

  std::ofstream out(fx.sidecar);
  facedup::features::write_sidecar(out, store);

  fx.expected_sets = {
      {"fx/s01/01.png", "fx/s01/02.png", "fx/s01/03.png"},
      {"fx/s02/01.png", "fx/s02/02.jpg"},
      {"fx/s03/01.png", "fx/s03/02.jpg"},
      {"fx/s04/01.png", "fx/s04/02.jpg", "fx/s04/03.jpg"},
      {"fx/s05/01.png", "fx/s06/01.jpg"},
      {"fx/s07/01.png", "fx/s08/01.jpg"},
      {"fx/s09/01.png", "fx/s10/01.jpg"},
      {"fx/s11/01.png", "fx/s12/01.jpg"},
  };
  fx.expected_plan =
      "fx\ts01/01.png\ts01\tkeep\t-\trepresentative\n"
      "fx\ts01/02.png\ts01\tremove\t-\texact_duplicate\n"
      "fx\ts01/03.png\ts01\tremove\t-\texact_duplicate\n"
      "fx\ts02/01.png\ts02\tkeep\t-\tfp_ejected\n"
      "fx\ts02/02.jpg\ts02\tkeep\t-\tfp_ejected\n"
      "fx\ts03/01.png\ts03\tremove\t-\tduplicate\n"
      "fx\ts03/02.jpg\ts03\tkeep\t-\trepresentative\n"
      "fx\ts04/01.png\ts04\tremove\t-\tduplicate\n"
      "fx\ts04/02.jpg\ts04\tkeep\t-\trepresentative\n"
      "fx\ts04/03.jpg\ts04\tremove\t-\tduplicate\n"
      "fx\ts05/01.png\ts05\tmove\ts06\tmoved\n"
      "fx\ts06/01.jpg\ts06\tremove\t-\tduplicate\n"
      "fx\ts07/01.png\ts07\tremove\t-\tduplicate\n"
      "fx\ts08/01.jpg\ts08\tremove\t-\tmargin\n"
      "fx\ts09/01.png\ts09\tremove\t-\tbelow_threshold\n"
      "fx\ts10/01.jpg\ts10\tremove\t-\tduplicate\n"
      "fx\ts11/01.png\ts11\tkeep\t-\tkept\n"
      "fx\ts12/01.jpg\ts12\tremove\t-\tduplicate\n";
  return fx;
}

}  // namespace fixture
