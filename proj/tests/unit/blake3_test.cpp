#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "facedup/hashing/blake3.hpp"
#include "facedup/hashing/digest.hpp"
#include "facedup/text.hpp"

using namespace facedup;
using namespace facedup::hashing;

namespace {

std::vector<std::byte> pattern(std::size_t n) {
  std::vector<std::byte> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<std::byte>(i % 251);
  return b;
}

}  // namespace

TEST(Blake3, EmptyInputDigest) {
  EXPECT_EQ(content_digest({}).hex(),
            "af1349b9f5f9a1a6a0404dea36dcc9499bcb25c9adc112b7cc9a93cae41f3262");
}

// Digests of the i % 251 byte pattern, produced with the reference Python
// binding and frozen in the data directory.
TEST(Blake3, PatternVectors) {
  std::ifstream in(std::string(FACEDUP_TEST_DATA) + "/blake3_vectors.tsv");
  ASSERT_TRUE(in);
  std::string line;
  int checked = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto f = text::split(line, '\t');
    ASSERT_EQ(f.size(), 2u);
    std::size_t n = 0;
    ASSERT_TRUE(text::parse_uint(f[0], n));
    EXPECT_EQ(content_digest(pattern(n)).hex(), f[1]) << "length " << n;
    ++checked;
  }
  EXPECT_GE(checked, 20);
}

TEST(Blake3, IncrementalEqualsOneShot) {
  std::mt19937_64 rng(1);
  for (std::size_t n : {0u, 1u, 64u, 1024u, 1025u, 5000u, 70000u}) {
    const auto data = pattern(n);
    Blake3 h;
    std::size_t pos = 0;
    while (pos < n) {
      const std::size_t step = std::min<std::size_t>(n - pos, 1 + rng() % 1500);
      h.update(std::span(data).subspan(pos, step));
      pos += step;
    }
    EXPECT_EQ(h.finalize(), content_digest(data).bytes) << n;
  }
}

TEST(Blake3, ExtendedOutputStartsWithDigest) {
  const auto data = pattern(3000);
  Blake3 h;
  h.update(data);
  std::array<std::uint8_t, 131> xof{};
  h.finalize(xof);
  const auto d = h.finalize();
  EXPECT_TRUE(std::equal(d.begin(), d.end(), xof.begin()));
}

TEST(Blake3, OneByteChangeChangesDigest) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    auto data = pattern(1 + rng() % 4000);
    const auto before = content_digest(data);
    data[rng() % data.size()] ^= static_cast<std::byte>(1 + rng() % 255);
    EXPECT_NE(content_digest(data), before);
  }
}
