#include "facedup/hashing/digest.hpp"

#include <algorithm>
#include <numeric>

#include "facedup/error.hpp"
#include "facedup/hashing/blake3.hpp"
#include "facedup/text.hpp"

namespace facedup::hashing {

std::string ContentDigest::hex() const { return text::to_hex(bytes.data(), bytes.size()); }

bool ContentDigest::from_hex(std::string_view s, ContentDigest& out) {
  return text::from_hex(s, out.bytes.data(), out.bytes.size());
}

ContentDigest content_digest(std::span<const std::byte> bytes) {
  Blake3 h;
  h.update(bytes);
  return ContentDigest{h.finalize()};
}

std::vector<std::vector<std::string>> verify_exact_group(
    std::vector<std::string> group, const ContentReader& read) {
  std::sort(group.begin(), group.end());
  group.erase(std::unique(group.begin(), group.end()), group.end());
  struct Subgroup {
    std::vector<std::byte> bytes;
    std::vector<std::string> members;
  };
  std::vector<Subgroup> subgroups;
  for (auto& id : group) {
    auto bytes = read(id);
    auto match = std::find_if(subgroups.begin(), subgroups.end(),
                              [&](const Subgroup& s) { return s.bytes == bytes; });
    if (match != subgroups.end()) {
      match->members.push_back(std::move(id));
    } else {
      subgroups.push_back({std::move(bytes), {std::move(id)}});
    }
  }
  std::vector<std::vector<std::string>> out;
  for (auto& s : subgroups) {
    if (s.members.size() >= 2) out.push_back(std::move(s.members));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<std::string>> find_exact_groups(
    std::span<const std::string> image_ids, std::span<const ContentDigest> digests,
    const ContentReader& read) {
  if (image_ids.size() != digests.size()) {
    throw Error("find_exact_groups: id/digest count mismatch");
  }
  std::vector<std::size_t> order(image_ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(digests[a], image_ids[a]) < std::tie(digests[b], image_ids[b]);
  });
  std::vector<std::vector<std::string>> out;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && digests[order[j]] == digests[order[i]]) ++j;
    if (j - i >= 2) {
      std::vector<std::string> bucket;
      for (std::size_t k = i; k < j; ++k) bucket.push_back(image_ids[order[k]]);
      for (auto& g : verify_exact_group(std::move(bucket), read)) out.push_back(std::move(g));
    }
    i = j;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace facedup::hashing
