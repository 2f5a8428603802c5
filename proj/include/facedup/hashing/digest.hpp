#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace facedup::hashing {

inline constexpr std::string_view kDigestAlgorithm = "blake3-256";

/// 256-bit content digest.
struct ContentDigest {
  std::array<std::uint8_t, 32> bytes{};

  std::string hex() const;
  static bool from_hex(std::string_view s, ContentDigest& out);

  auto operator<=>(const ContentDigest&) const = default;
  bool operator==(const ContentDigest&) const = default;
};

ContentDigest content_digest(std::span<const std::byte> bytes);

/// Returns the bytes of an image by id; throws on I/O failure.
using ContentReader = std::function<std::vector<std::byte>(const std::string& image_id)>;

/// Splits a digest bucket into byte-identical subgroups. Subgroups of size 1
/// are dropped. Members and subgroups come back sorted.
std::vector<std::vector<std::string>> verify_exact_group(
    std::vector<std::string> group, const ContentReader& read);

/// Buckets images by digest and verifies every multi-member bucket
/// byte-for-byte. `digests[i]` belongs to `image_ids[i]`; callers may inject
/// arbitrary digests, output never contains non-identical files.
std::vector<std::vector<std::string>> find_exact_groups(
    std::span<const std::string> image_ids, std::span<const ContentDigest> digests,
    const ContentReader& read);

}  // namespace facedup::hashing
