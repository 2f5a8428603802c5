#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace facedup::corpus {

/// 8-bit interleaved pixel samples, row-major. channels is 3 (RGB) or 1.
struct PixelBuffer {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<std::uint8_t> data;

  PixelBuffer() = default;
  PixelBuffer(int w, int h, int c, std::uint8_t fill = 0)
      : width(w), height(h), channels(c),
        data(static_cast<std::size_t>(w) * h * c, fill) {}

  bool empty() const noexcept { return width <= 0 || height <= 0; }

  std::uint8_t& at(int x, int y, int c = 0) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t at(int x, int y, int c = 0) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  bool operator==(const PixelBuffer&) const = default;
};

/// Decodes JPEG, PNG or BMP bytes into an 8-bit RGB buffer. Grayscale input
/// is replicated to three channels, alpha is dropped and EXIF orientation is
/// ignored. Throws DecodeError carrying `image_id` on corrupt input.
PixelBuffer decode_canonical(std::span<const std::byte> bytes,
                             const std::string& image_id = {});

/// Luma conversion matching the reference imaging library's RGB->L
/// conversion: (19595 R + 38470 G + 7471 B + 0x8000) >> 16.
/// A one-channel buffer is returned unchanged.
PixelBuffer to_grayscale(const PixelBuffer& buf);

/// Single-pixel form of to_grayscale.
constexpr std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return static_cast<std::uint8_t>(
      (r * 19595u + g * 38470u + b * 7471u + 0x8000u) >> 16);
}

/// Lossless PNG encoding (used for materialized aligned crops and fixtures).
std::vector<std::byte> encode_png(const PixelBuffer& buf);

/// Lossless BMP encoding.
std::vector<std::byte> encode_bmp(const PixelBuffer& buf);

/// Baseline JPEG encoding at the given quality (1..100).
std::vector<std::byte> encode_jpeg(const PixelBuffer& buf, int quality);

}  // namespace facedup::corpus
