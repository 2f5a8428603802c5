#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <string>

#include "facedup/corpus/image.hpp"

namespace facedup::hashing {

/// 64-bit image hash over an 8x8 boolean grid. Grid cell i (row-major) is
/// stored in bit (63 - i), so the hex form reads like the reference tool's.
struct PHash64 {
  std::uint64_t bits = 0;

  static constexpr std::uint64_t mask_for(int cell) { return 1ull << (63 - cell); }
  bool cell(int i) const { return (bits & mask_for(i)) != 0; }

  std::string hex() const;
  auto operator<=>(const PHash64&) const = default;
};

constexpr int hamming(PHash64 a, PHash64 b) { return std::popcount(a.bits ^ b.bits); }

/// Unnormalized type-II DCT, y[k] = 2 sum_n x[n] cos(pi k (2n + 1) / 2N), for
/// power-of-two lengths. Uses the even/odd split recursively, so symmetric and
/// constant inputs yield exactly zero where the true coefficient is zero.
void dct2(std::span<const double> in, std::span<double> out);

/// DCT perceptual hash: luma, 32x32 Lanczos resize, 2-D DCT (rows then
/// columns), 8x8 low-frequency block thresholded strictly above its median.
/// Throws on an empty buffer.
PHash64 phash(const corpus::PixelBuffer& buf);

/// Horizontal difference hash: luma, 9x8 Lanczos resize, bit set where a pixel
/// is brighter than its left neighbour.
PHash64 dhash(const corpus::PixelBuffer& buf);

}  // namespace facedup::hashing
