#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace facedup::eval {

struct ScoredPair {
  std::size_t a = 0, b = 0;  // indices into the evaluated image list
  bool mated = false;
  double score = 0;
  double pair_quality = 0;
};

/// Circular pairing over n images in order: (i, i+1) for every i, plus
/// (n-1, 0) when n > 2. One pair for n == 2, none below.
std::vector<std::pair<std::size_t, std::size_t>> circular_mated_pairs(std::size_t n);

/// Number of distinct unordered pairs of images with different labels.
std::uint64_t count_cross_pairs(std::span<const std::size_t> labels);

/// n distinct unordered cross-label pairs (i < j), uniformly at random from
/// a 64-bit Mersenne Twister seeded with `seed`. Throws DataError if fewer
/// than n such pairs exist. Output is sorted.
std::vector<std::pair<std::size_t, std::size_t>> sample_nonmated(
    std::span<const std::size_t> labels, std::size_t n, std::uint64_t seed);

/// A comparison is a match iff score >= threshold.
/// FNMR(t) = #mated below t / #mated, FMR(t) = #non-mated at or above t / #non-mated.
struct Rates {
  double fnmr = 0;
  double fmr = 0;
};

/// Mated and non-mated scores sorted ascending, with rate queries.
class ScoreSets {
 public:
  ScoreSets(std::vector<double> mated, std::vector<double> nonmated);
  explicit ScoreSets(std::span<const ScoredPair> pairs);

  Rates at(double threshold) const;
  /// Distinct scores ascending followed by +infinity.
  std::vector<double> candidate_thresholds() const;
  std::size_t mated_count() const noexcept { return mated_.size(); }
  std::size_t nonmated_count() const noexcept { return nonmated_.size(); }

 private:
  std::vector<double> mated_, nonmated_;
};

/// Equal error rate; linear interpolation between the two candidate
/// thresholds where FNMR - FMR changes sign. Throws if a class is empty.
double eer(const ScoreSets& s);

struct OperatingPoint {
  double threshold = 0;  // may be +infinity
  double fnmr = 0;
  double fmr = 0;        // achieved
  bool target_below_resolution = false;  // target < 1 / #non-mated
};

/// Lowest candidate threshold whose FMR does not exceed the target.
OperatingPoint fnmr_at_fmr(const ScoreSets& s, double target_fmr);

enum class EdcError { kFnmr, kFmr };

struct EdcPoint {
  double discard = 0;
  double error = 0;
  bool operator==(const EdcPoint&) const = default;
};

/// Error versus discard over the pairs of the matching class (mated pairs
/// for FNMR, non-mated for FMR), discarding lowest pair quality first with
/// equal qualities discarded together. The error is a step function of the
/// discard fraction: each discard step is stored as a vertical segment and
/// the last error extends to fraction 1. Empty input yields an empty curve.
std::vector<EdcPoint> edc(std::span<const ScoredPair> pairs, double threshold, EdcError kind);

/// Area under the piecewise-linear curve over [lo, hi] divided by hi - lo.
/// Throws when the range is empty or exceeds the curve's domain.
double pauc(std::span<const EdcPoint> curve, double lo = 0.0, double hi = 0.2);

}  // namespace facedup::eval
