#include <algorithm>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "facedup/corpus/manifest.hpp"
#include "facedup/error.hpp"
#include "support/tempdir.hpp"

using namespace facedup;
using namespace facedup::corpus;

TEST(Manifest, SubjectsFromParentDirectories) {
  synth::TempDir dir;
  synth::spit(dir / "ds/a/1.jpg", "x");
  synth::spit(dir / "ds/a/2.jpg", "xy");
  synth::spit(dir / "ds/b/1.jpg", "xyz");
  const auto built = build_manifest({{"ds", dir / "ds"}});
  EXPECT_EQ(built.manifest.size(), 3u);
  EXPECT_EQ(built.manifest.subject_count(), 2u);
  EXPECT_TRUE(built.skipped.empty());
  const auto& r = built.manifest.at("ds/a/2.jpg");
  EXPECT_EQ(r.subject_id, "a");
  EXPECT_EQ(r.rel_path, "a/2.jpg");
  EXPECT_EQ(r.byte_len, 2u);
}

TEST(Manifest, SkipsAreRecorded) {
  synth::TempDir dir;
  synth::spit(dir / "ds/loose.jpg", "x");
  synth::spit(dir / "ds/a/notes.txt", "x");
  synth::spit(dir / "ds/a/ok.PNG", "x");
  synth::spit(dir / "ds/a/gone.bmp", "x");
  synth::spit(dir / "skip.txt", "# comment\na/gone.bmp\n\n");
  ManifestOptions opts;
  opts.excluded["ds"] = read_path_list(dir / "skip.txt");
  const auto built = build_manifest({{"ds", dir / "ds"}}, opts);
  ASSERT_EQ(built.manifest.size(), 1u);
  EXPECT_EQ(built.manifest.records()[0].rel_path, "a/ok.PNG");
  const std::vector<SkippedFile> expected = {{"ds", "a/gone.bmp", "excluded"},
                                             {"ds", "a/notes.txt", "unrecognized_extension"},
                                             {"ds", "loose.jpg", "no_subject_directory"}};
  EXPECT_EQ(built.skipped, expected);
}

TEST(Manifest, NestedDirectoryUsesImmediateParent) {
  synth::TempDir dir;
  synth::spit(dir / "ds/group/person/1.jpg", "x");
  const auto built = build_manifest({{"ds", dir / "ds"}});
  ASSERT_EQ(built.manifest.size(), 1u);
  EXPECT_EQ(built.manifest.records()[0].subject_id, "person");
}

TEST(Manifest, MissingRootIsFatal) {
  synth::TempDir dir;
  EXPECT_THROW(build_manifest({{"ds", dir / "nope"}}), IoError);
}

TEST(Manifest, SortedAndIndependentOfInsertionOrder) {
  std::vector<ImageRecord> recs;
  for (int s = 0; s < 5; ++s) {
    for (int i = 0; i < 4; ++i) {
      const std::string ds = s % 2 ? "b" : "a";
      const std::string rel = "s" + std::to_string(s) + "/" + std::to_string(i) + ".jpg";
      recs.push_back({make_image_id(ds, rel), ds, "s" + std::to_string(s), rel, 1});
    }
  }
  const Manifest reference(recs);
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(recs.begin(), recs.end(), rng);
    const Manifest m(recs);
    EXPECT_EQ(m.records(), reference.records());
  }
  EXPECT_TRUE(std::is_sorted(reference.records().begin(), reference.records().end(),
                             [](const auto& x, const auto& y) {
                               return std::tie(x.dataset_id, x.rel_path) <
                                      std::tie(y.dataset_id, y.rel_path);
                             }));
  EXPECT_EQ(reference.datasets(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(reference.subject_count(), 5u);
}

TEST(Manifest, PlantedCountsFromSyntheticTree) {
  synth::TempDir dir;
  std::mt19937_64 rng(8);
  std::size_t images = 0;
  const int subjects = 17;
  for (int s = 0; s < subjects; ++s) {
    const int n = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
      synth::spit(dir / ("ds/p" + std::to_string(s) + "/" + std::to_string(i) + ".png"), "x");
      ++images;
    }
  }
  const auto built = build_manifest({{"ds", dir / "ds"}});
  EXPECT_EQ(built.manifest.size(), images);
  EXPECT_EQ(built.manifest.subject_count(), static_cast<std::size_t>(subjects));
  std::size_t total = 0;
  for (const auto& [key, idx] : built.manifest.subjects()) total += idx.size();
  EXPECT_EQ(total, images);
}

TEST(Manifest, DuplicateRecordRejected) {
  std::vector<ImageRecord> recs = {{"d/a/1.jpg", "d", "a", "a/1.jpg", 1},
                                   {"d/a/1.jpg", "d", "a", "a/1.jpg", 1}};
  EXPECT_THROW(Manifest{recs}, DataError);
}

TEST(Manifest, EmptySubjectRejected) {
  std::vector<ImageRecord> recs = {{"d/1.jpg", "d", "", "1.jpg", 1}};
  EXPECT_THROW(Manifest{recs}, DataError);
}

TEST(Manifest, TsvRoundTrip) {
  const Manifest m({{"d/a/1.jpg", "d", "a", "a/1.jpg", 10}, {"e/b/2.png", "e", "b", "b/2.png", 20}});
  std::stringstream ss;
  write_manifest(ss, m);
  EXPECT_EQ(ss.str(), "d\ta\ta/1.jpg\t10\ne\tb\tb/2.png\t20\n");
  EXPECT_EQ(read_manifest(ss).records(), m.records());
}

TEST(Manifest, MalformedTsvRejected) {
  std::stringstream ss("d\ta\ta/1.jpg\n");
  EXPECT_THROW(read_manifest(ss), DataError);
}
