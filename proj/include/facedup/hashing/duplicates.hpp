#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "facedup/corpus/manifest.hpp"
#include "facedup/corpus/source.hpp"
#include "facedup/error.hpp"
#include "facedup/hashing/crop_resistant.hpp"
#include "facedup/hashing/digest.hpp"
#include "facedup/hashing/phash.hpp"

namespace facedup::hashing {

enum class DupSource { kExact, kPHash, kCropResistant };
enum class ImageVariant { kOriginal, kPreprocessed };

std::string_view to_string(DupSource s);
std::string_view to_string(ImageVariant v);
DupSource dup_source_from_string(std::string_view s);
ImageVariant variant_from_string(std::string_view s);

/// Images found to match under one detection criterion. Members are sorted
/// image ids, at least two of them.
struct RawDupSet {
  std::vector<std::string> members;
  DupSource source = DupSource::kExact;
  ImageVariant variant = ImageVariant::kOriginal;

  bool operator==(const RawDupSet&) const = default;
  auto operator<=>(const RawDupSet& o) const {
    return std::tie(variant, source, members) <=> std::tie(o.variant, o.source, o.members);
  }
};

/// Raised by a content provider for images that are deliberately left out
/// (for example, no usable face for the aligned variant).
class ImageSkipped : public Error {
 public:
  ImageSkipped(std::string reason, const std::string& what)
      : Error(what), reason_(std::move(reason)) {}
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
};

/// Supplies what is hashed for one image variant. identity_bytes() defines
/// exact-duplicate identity; pixels() turns those bytes into an image.
class ContentProvider {
 public:
  virtual ~ContentProvider() = default;
  virtual std::vector<std::byte> identity_bytes(const corpus::ImageRecord& rec) const = 0;
  virtual corpus::PixelBuffer pixels(const corpus::ImageRecord& rec,
                                     std::span<const std::byte> identity) const = 0;
};

/// The encoded file itself.
class OriginalContent final : public ContentProvider {
 public:
  explicit OriginalContent(const corpus::ByteSource& source) : source_(source) {}
  std::vector<std::byte> identity_bytes(const corpus::ImageRecord& rec) const override;
  corpus::PixelBuffer pixels(const corpus::ImageRecord& rec,
                             std::span<const std::byte> identity) const override;

 private:
  const corpus::ByteSource& source_;
};

struct ScanConfig {
  bool phash = true;
  int phash_max_distance = 0;
  bool crop_resistant = true;
  CropResistantParams crop;
  MatchParams match;
  unsigned workers = 1;

  void validate() const;  // throws ConfigError
};

/// Identifies the hashing algorithms and parameters; cache entries written
/// under a different version are ignored.
std::string hash_algorithm_version(const ScanConfig& config);

struct ImageHashes {
  std::string image_id;
  ContentDigest digest;
  PHash64 phash;
  MultiHash multihash;  // empty when crop-resistant hashing is off
};

struct ImageFailure {
  std::string image_id;
  std::string reason;  // io_error, decode_error or a provider skip reason
  std::string detail;
  bool operator==(const ImageFailure&) const = default;
};

struct HashScan {
  ImageVariant variant = ImageVariant::kOriginal;
  std::vector<ImageHashes> images;     // manifest order
  std::vector<ImageFailure> failures;  // manifest order
  std::size_t cache_hits = 0;
};

/// Perceptual hashes keyed by (variant, content digest).
/// File lines: image_id \t variant \t digest \t phash \t segment hashes.
class HashCache {
 public:
  explicit HashCache(std::string version) : version_(std::move(version)) {}

  /// Returns false (and loads nothing) when the file's version differs.
  bool load(std::istream& in);
  void write(std::ostream& out) const;

  struct Entry {
    PHash64 phash;
    MultiHash multihash;
  };
  const Entry* find(ImageVariant v, const ContentDigest& d) const;
  void put(const ImageHashes& h, ImageVariant v);
  std::size_t size() const noexcept { return lines_.size(); }

 private:
  std::string version_;
  std::map<std::pair<ImageVariant, ContentDigest>, Entry> by_digest_;
  std::map<std::pair<std::string, ImageVariant>, std::pair<ContentDigest, Entry>> lines_;
};

/// Digests and hashes every manifest image through the provider. Per-image
/// failures are collected, not thrown. `cache` may be null.
HashScan compute_hashes(const corpus::Manifest& manifest, const ContentProvider& provider,
                        ImageVariant variant, const ScanConfig& config,
                        HashCache* cache = nullptr);

/// Exact sets from verified digest buckets, pHash sets (connected components
/// of pairs within the configured distance; distance 0 is hash equality) and
/// crop-resistant sets (connected components of matching pairs). Output is
/// sorted and independent of worker count.
std::vector<RawDupSet> find_duplicate_sets(const HashScan& scan, const ContentReader& read,
                                           const ScanConfig& config);

/// Pairs (i, j), i < j, of `images` whose hashes are within `max_distance`.
std::vector<std::pair<std::size_t, std::size_t>> phash_pairs(
    std::span<const ImageHashes> images, int max_distance);

/// Pairs (i, j), i < j, whose multi-hashes match.
std::vector<std::pair<std::size_t, std::size_t>> crop_resistant_pairs(
    std::span<const ImageHashes> images, const MatchParams& params, unsigned workers);

/// Line format: source \t variant \t id1 \t id2 ...
void write_sets(std::ostream& out, std::span<const RawDupSet> sets);
std::vector<RawDupSet> read_sets(std::istream& in);

}  // namespace facedup::hashing
