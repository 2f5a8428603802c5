#include "facedup/hashing/crop_resistant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "facedup/error.hpp"
#include "facedup/hashing/resample.hpp"
#include "facedup/text.hpp"

namespace facedup::hashing {

std::string_view to_string(SegmentHash h) {
  return h == SegmentHash::kDHash ? "dhash" : "phash";
}

SegmentHash segment_hash_from_string(std::string_view s) {
  if (s == "dhash") return SegmentHash::kDHash;
  if (s == "phash") return SegmentHash::kPHash;
  throw ConfigError("unknown segment hash: " + std::string(s));
}

std::string MultiHash::hex_list() const {
  std::string out;
  for (std::size_t i = 0; i < segment_hashes.size(); ++i) {
    if (i) out += ',';
    out += segment_hashes[i].hex();
  }
  return out;
}

bool MultiHash::from_hex_list(std::string_view s, MultiHash& out) {
  out.segment_hashes.clear();
  if (s.empty() || s == "-") return true;
  for (const auto& part : text::split(s, ',')) {
    PHash64 h;
    if (!text::from_hex64(part, h.bits)) return false;
    out.segment_hashes.push_back(h);
  }
  return true;
}

std::vector<Segment> find_segments(const corpus::PixelBuffer& img, int threshold,
                                   int min_segment_size) {
  if (img.channels != 1 || img.empty()) throw Error("find_segments: bad input");
  const int rows = img.height;
  const int cols = img.width;
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  std::vector<std::uint8_t> hill(n), assigned(n, 0), marked(n, 0);
  for (std::size_t i = 0; i < n; ++i) hill[i] = img.data[i] > threshold;

  // `marked` tracks pixels the reference bookkeeping counts as segmented: a
  // region's seed is only counted once the flood reaches it from a
  // neighbour, i.e. single-pixel regions never count.
  std::size_t marked_count = 2 * static_cast<std::size_t>(rows + cols);
  std::vector<Segment> segments;
  std::vector<std::size_t> stack;

  auto flood = [&](std::size_t seed, bool want_hill) {
    Segment seg;
    seg.min_row = seg.max_row = static_cast<int>(seed / cols);
    seg.min_col = seg.max_col = static_cast<int>(seed % cols);
    stack.assign(1, seed);
    assigned[seed] = 1;
    int size = 0;
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      ++size;
      const int r = static_cast<int>(p / cols);
      const int c = static_cast<int>(p % cols);
      seg.min_row = std::min(seg.min_row, r);
      seg.max_row = std::max(seg.max_row, r);
      seg.min_col = std::min(seg.min_col, c);
      seg.max_col = std::max(seg.max_col, c);
      const std::size_t nbrs[4] = {r > 0 ? p - cols : n, r + 1 < rows ? p + cols : n,
                                   c > 0 ? p - 1 : n, c + 1 < cols ? p + 1 : n};
      for (std::size_t q : nbrs) {
        if (q == n || assigned[q] || (hill[q] != 0) != want_hill) continue;
        assigned[q] = 1;
        stack.push_back(q);
      }
    }
    seg.size = size;
    return seg;
  };

  auto account = [&](const Segment& seg) {
    // Every flooded pixel except an isolated seed enters the marked set.
    if (seg.size >= 2) marked_count += static_cast<std::size_t>(seg.size);
    if (seg.size > min_segment_size) segments.push_back(seg);
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (hill[i] && !assigned[i]) account(flood(i, true));
  }
  std::size_t cursor = 0;
  while (marked_count < n) {
    while (cursor < n && (hill[cursor] || assigned[cursor])) ++cursor;
    if (cursor == n) break;
    account(flood(cursor, false));
  }
  return segments;
}

MultiHash crop_resistant_hash(const corpus::PixelBuffer& buf,
                              const CropResistantParams& params) {
  if (buf.empty()) throw Error("crop_resistant_hash: empty image");
  const auto gray = corpus::to_grayscale(buf);
  const int size = params.segmentation_size;
  auto work = resize_lanczos(gray, size, size);
  work = median_filter3(gaussian_blur(work, params.blur_radius));

  auto segments = find_segments(work, params.segment_threshold, params.min_segment_size);
  if (segments.empty()) {
    Segment whole;
    whole.size = 2;
    whole.max_row = whole.max_col = size - 1;
    segments.push_back(whole);
  }

  const double scale_w = static_cast<double>(gray.width) / size;
  const double scale_h = static_cast<double>(gray.height) / size;
  // Half-to-even rounding of the scaled bounds, as in the reference crop.
  auto round_even = [](double v) { return static_cast<int>(std::nearbyint(v)); };
  MultiHash out;
  for (const auto& s : segments) {
    const int y0 = round_even(s.min_row * scale_h);
    const int x0 = round_even(s.min_col * scale_w);
    int y1 = round_even((s.max_row + 1) * scale_h);
    int x1 = round_even((s.max_col + 1) * scale_w);
    // Tiny images can round a box to zero area; widen it to one pixel.
    x1 = std::max(x1, x0 + 1);
    y1 = std::max(y1, y0 + 1);
    const auto box = crop(gray, x0, y0, x1, y1);
    out.segment_hashes.push_back(params.segment_hash == SegmentHash::kDHash ? dhash(box)
                                                                            : phash(box));
  }
  return out;
}

int MatchParams::hamming_cutoff() const {
  return static_cast<int>(std::floor(64.0 * bit_error_rate + 1e-12));
}

int count_matching_segments(const MultiHash& a, const MultiHash& b,
                            const MatchParams& params) {
  if (a.empty() || b.empty()) return 0;
  // Canonical argument order keeps greedy tie-breaking symmetric.
  const bool swap = b < a;
  const auto& x = swap ? b.segment_hashes : a.segment_hashes;
  const auto& y = swap ? a.segment_hashes : b.segment_hashes;
  const int cutoff = params.hamming_cutoff();
  std::vector<std::tuple<int, std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      const int d = hamming(x[i], y[j]);
      if (d <= cutoff) pairs.emplace_back(d, i, j);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<std::uint8_t> used_x(x.size(), 0), used_y(y.size(), 0);
  int matched = 0;
  for (const auto& [d, i, j] : pairs) {
    if (used_x[i] || used_y[j]) continue;
    used_x[i] = used_y[j] = 1;
    ++matched;
  }
  return matched;
}

bool multihash_match(const MultiHash& a, const MultiHash& b, const MatchParams& params) {
  if (params.region_cutoff < 1 || !(params.bit_error_rate > 0 && params.bit_error_rate <= 1)) {
    throw ConfigError("multihash_match: region cutoff must be >= 1 and bit error rate in (0, 1]");
  }
  return count_matching_segments(a, b, params) >= params.region_cutoff;
}

}  // namespace facedup::hashing
