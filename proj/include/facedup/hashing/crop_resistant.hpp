#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "facedup/corpus/image.hpp"
#include "facedup/hashing/phash.hpp"

namespace facedup::hashing {

enum class SegmentHash { kDHash, kPHash };

std::string_view to_string(SegmentHash h);
SegmentHash segment_hash_from_string(std::string_view s);

struct CropResistantParams {
  int segmentation_size = 300;  // square working resolution
  int segment_threshold = 128;  // hills are pixels strictly above
  int min_segment_size = 500;   // segments must be strictly larger
  float blur_radius = 2.0f;
  SegmentHash segment_hash = SegmentHash::kDHash;
};

/// Per-segment hashes of one image.
struct MultiHash {
  std::vector<PHash64> segment_hashes;

  bool empty() const noexcept { return segment_hashes.empty(); }
  std::string hex_list() const;  // comma-separated, "" when empty
  static bool from_hex_list(std::string_view s, MultiHash& out);
  bool operator==(const MultiHash&) const = default;
  auto operator<=>(const MultiHash&) const = default;
};

/// A segment in segmentation coordinates: pixel count and inclusive bounds.
struct Segment {
  int size = 0;
  int min_row = 0, min_col = 0, max_row = 0, max_col = 0;
};

/// Bright/dark region segmentation on a blurred, median-filtered grayscale
/// image at segmentation resolution. Hills (> threshold) are flood-filled in
/// row-major start order, then valleys, with the reference tool's
/// termination rule for the valley pass.
std::vector<Segment> find_segments(const corpus::PixelBuffer& segmentation_gray,
                                   int threshold, int min_segment_size);

/// Crop-resistant multi-hash. An image without any qualifying segment is
/// hashed as one segment covering the whole frame.
MultiHash crop_resistant_hash(const corpus::PixelBuffer& buf,
                              const CropResistantParams& params = {});

struct MatchParams {
  int region_cutoff = 1;
  double bit_error_rate = 0.25;

  int hamming_cutoff() const;  // floor(64 * bit_error_rate)
};

/// Counts one-to-one segment pairs chosen greedily by ascending Hamming
/// distance whose distance is within the cutoff. Symmetric in its arguments.
int count_matching_segments(const MultiHash& a, const MultiHash& b,
                            const MatchParams& params = {});

/// True iff at least region_cutoff segment pairs match. Empty never matches.
bool multihash_match(const MultiHash& a, const MultiHash& b,
                     const MatchParams& params = {});

}  // namespace facedup::hashing
