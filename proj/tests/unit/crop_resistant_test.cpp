#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "facedup/corpus/source.hpp"
#include "facedup/error.hpp"
#include "facedup/hashing/crop_resistant.hpp"
#include "support/synth.hpp"

using namespace facedup;
using namespace facedup::hashing;

namespace {

MultiHash hashes(std::initializer_list<std::uint64_t> bits) {
  MultiHash m;
  for (auto b : bits) m.segment_hashes.push_back(PHash64{b});
  return m;
}

}  // namespace

TEST(CropResistant, MatchesFrozenReference) {
  std::ifstream in(std::string(FACEDUP_TEST_DATA) + "/reference_hashes.tsv");
  std::string line;
  int checked = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string file, ph, dh, segments;
    std::getline(ss, file, '\t');
    std::getline(ss, ph, '\t');
    std::getline(ss, dh, '\t');
    std::getline(ss, segments, '\t');
    const auto img = corpus::decode_canonical(
        corpus::read_file(std::string(FACEDUP_TEST_DATA) + "/images/" + file));
    EXPECT_EQ(crop_resistant_hash(img).hex_list(), segments) << file;
    ++checked;
  }
  EXPECT_EQ(checked, 10);
}

TEST(CropResistant, RegionCutoff) {
  const auto a = hashes({0x0, 0xFFFF'FFFF'0000'0000ull, 0x00FF'00FF'00FF'00FFull});
  const auto b = hashes({0x7, 0x0000'0000'FFFF'FFFFull, 0xFF00'FF00'FF00'FF00ull});
  EXPECT_EQ(count_matching_segments(a, b), 1);
  EXPECT_TRUE(multihash_match(a, b, {1, 0.25}));
  EXPECT_FALSE(multihash_match(a, b, {2, 0.25}));
}

TEST(CropResistant, CutoffFromBitErrorRate) {
  EXPECT_EQ(MatchParams{}.hamming_cutoff(), 16);
  EXPECT_EQ((MatchParams{1, 0.1}).hamming_cutoff(), 6);
  const auto a = hashes({0});
  EXPECT_TRUE(multihash_match(a, hashes({0xFFFF}), {}));
  EXPECT_FALSE(multihash_match(a, hashes({0x1FFFF}), {}));
}

TEST(CropResistant, EmptyNeverMatches) {
  const MultiHash empty;
  EXPECT_FALSE(multihash_match(empty, empty));
  EXPECT_FALSE(multihash_match(empty, hashes({0})));
}

TEST(CropResistant, GreedyPairsAreOneToOne) {
  // Both segments of b are close to the single segment of a; only one pair may count.
  EXPECT_EQ(count_matching_segments(hashes({0}), hashes({1, 3})), 1);
  EXPECT_EQ(count_matching_segments(hashes({0, 0}), hashes({0})), 1);
}

TEST(CropResistant, IdenticalAndSymmetric) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    MultiHash a, b;
    for (int i = 0, n = 1 + rng() % 6; i < n; ++i) a.segment_hashes.push_back(PHash64{rng()});
    for (int i = 0, n = 1 + rng() % 6; i < n; ++i) {
      // Mostly near copies of a's segments so that matches actually occur.
      const auto base = a.segment_hashes[rng() % a.segment_hashes.size()].bits;
      b.segment_hashes.push_back(PHash64{base ^ (rng() & rng() & rng())});
    }
    EXPECT_TRUE(multihash_match(a, a));
    EXPECT_EQ(count_matching_segments(a, a), static_cast<int>(a.segment_hashes.size()));
    EXPECT_EQ(count_matching_segments(a, b), count_matching_segments(b, a));
  }
}

TEST(CropResistant, NonPositiveParametersRejected) {
  const auto a = hashes({0});
  EXPECT_THROW(multihash_match(a, a, {0, 0.25}), ConfigError);
  EXPECT_THROW(multihash_match(a, a, {1, 0.0}), ConfigError);
  EXPECT_THROW(multihash_match(a, a, {1, 1.5}), ConfigError);
}

TEST(CropResistant, HexListRoundTrip) {
  const auto a = hashes({0x0123456789abcdefull, 0, ~0ull});
  EXPECT_EQ(a.hex_list(), "0123456789abcdef,0000000000000000,ffffffffffffffff");
  MultiHash back;
  ASSERT_TRUE(MultiHash::from_hex_list(a.hex_list(), back));
  EXPECT_EQ(back, a);
  ASSERT_TRUE(MultiHash::from_hex_list("", back));
  EXPECT_TRUE(back.empty());
  EXPECT_FALSE(MultiHash::from_hex_list("xyz", back));
  EXPECT_FALSE(MultiHash::from_hex_list("0123", back));
}

TEST(CropResistant, SurvivesCrop) {
  // Two bright discs on a dark ground; the crop removes 20% on the right.
  corpus::PixelBuffer img(250, 200, 3, 30);
  auto disc = [&](int cx, int cy, int r, std::uint8_t v) {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) {
          for (int c = 0; c < 3; ++c) img.at(x, y, c) = static_cast<std::uint8_t>(v + (x + y) % 7);
        }
      }
    }
  };
  disc(60, 70, 40, 200);
  disc(120, 140, 35, 230);
  corpus::PixelBuffer cropped(200, 200, 3);
  for (int y = 0; y < 200; ++y) {
    for (int x = 0; x < 200; ++x) {
      for (int c = 0; c < 3; ++c) cropped.at(x, y, c) = img.at(x, y, c);
    }
  }
  const auto ha = crop_resistant_hash(img);
  const auto hb = crop_resistant_hash(cropped);
  EXPECT_GE(ha.segment_hashes.size(), 2u);
  EXPECT_TRUE(multihash_match(ha, hb));
}
