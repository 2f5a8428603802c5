#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "facedup/hashing/bk_tree.hpp"

using facedup::hashing::BkTree;

TEST(BkTree, EmptyTreeFindsNothing) {
  BkTree t;
  int calls = 0;
  t.query(0, 64, [&](std::size_t, int) { ++calls; });
  EXPECT_EQ(calls, 0);
}

TEST(BkTree, EqualKeysShareANode) {
  BkTree t;
  t.insert(5, 0);
  t.insert(5, 1);
  t.insert(4, 2);
  EXPECT_EQ(t.node_count(), 2u);
  std::vector<std::size_t> hits;
  t.query(5, 0, [&](std::size_t v, int d) {
    EXPECT_EQ(d, 0);
    hits.push_back(v);
  });
  EXPECT_EQ(hits, (std::vector<std::size_t>{0, 1}));
}

TEST(BkTree, RadiusQueriesEqualBruteForce) {
  std::mt19937_64 rng(17);
  std::vector<std::uint64_t> keys;
  const std::vector<std::uint64_t> centres = {rng(), rng(), rng(), rng()};
  for (int i = 0; i < 3000; ++i) {
    // Clustered keys so that small radii return non-trivial results.
    const auto c = centres[rng() % centres.size()];
    keys.push_back(i % 10 == 0 ? rng() : c ^ (rng() & rng() & rng() & rng()));
  }
  BkTree t;
  for (std::size_t i = 0; i < keys.size(); ++i) t.insert(keys[i], i);
  for (int q = 0; q < 60; ++q) {
    const std::uint64_t key = q % 2 ? keys[rng() % keys.size()] : rng();
    for (int radius : {0, 2, 4, 10, 24, 64}) {
      std::vector<std::pair<std::size_t, int>> got, want;
      t.query(key, radius, [&](std::size_t v, int d) { got.emplace_back(v, d); });
      for (std::size_t i = 0; i < keys.size(); ++i) {
        const int d = std::popcount(keys[i] ^ key);
        if (d <= radius) want.emplace_back(i, d);
      }
      std::sort(got.begin(), got.end());
      ASSERT_EQ(got, want) << "query " << q << " radius " << radius;
    }
  }
}
