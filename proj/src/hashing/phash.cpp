#include "facedup/hashing/phash.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "facedup/error.hpp"
#include "facedup/hashing/resample.hpp"
#include "facedup/text.hpp"

namespace facedup::hashing {

std::string PHash64::hex() const { return text::to_hex64(bits); }

void dct2(std::span<const double> in, std::span<double> out) {
  const std::size_t n = in.size();
  if (n == 0 || (n & (n - 1)) != 0 || out.size() != n) {
    throw Error("dct2: length must be a power of two");
  }
  if (n == 1) {
    out[0] = 2.0 * in[0];
    return;
  }
  const std::size_t half = n / 2;
  std::vector<double> sum(half), diff(half), even(half);
  for (std::size_t i = 0; i < half; ++i) {
    sum[i] = in[i] + in[n - 1 - i];
    diff[i] = in[i] - in[n - 1 - i];
  }
  dct2(sum, even);
  for (std::size_t m = 0; m < half; ++m) out[2 * m] = even[m];
  for (std::size_t k = 1; k < n; k += 2) {
    double acc = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
      acc += diff[i] * std::cos(std::numbers::pi * static_cast<double>(k * (2 * i + 1)) /
                                static_cast<double>(2 * n));
    }
    out[k] = 2.0 * acc;
  }
}

PHash64 phash(const corpus::PixelBuffer& buf) {
  if (buf.empty()) throw Error("phash: empty image");
  constexpr int kSize = 32;
  constexpr int kLow = 8;
  const auto small = resize_lanczos(corpus::to_grayscale(buf), kSize, kSize);

  std::vector<double> coeffs(kSize * kSize);
  std::vector<double> line(kSize), transformed(kSize);
  for (int y = 0; y < kSize; ++y) {
    for (int x = 0; x < kSize; ++x) line[x] = small.at(x, y);
    dct2(line, transformed);
    std::copy(transformed.begin(), transformed.end(), coeffs.begin() + y * kSize);
  }
  for (int x = 0; x < kLow; ++x) {
    for (int y = 0; y < kSize; ++y) line[y] = coeffs[y * kSize + x];
    dct2(line, transformed);
    for (int y = 0; y < kSize; ++y) coeffs[y * kSize + x] = transformed[y];
  }

  std::array<double, kLow * kLow> low;
  for (int r = 0; r < kLow; ++r) {
    for (int c = 0; c < kLow; ++c) low[r * kLow + c] = coeffs[r * kSize + c];
  }
  auto sorted = low;
  std::sort(sorted.begin(), sorted.end());
  const double median = (sorted[31] + sorted[32]) / 2.0;

  PHash64 h;
  for (int i = 0; i < kLow * kLow; ++i) {
    if (low[i] > median) h.bits |= PHash64::mask_for(i);
  }
  return h;
}

PHash64 dhash(const corpus::PixelBuffer& buf) {
  if (buf.empty()) throw Error("dhash: empty image");
  const auto small = resize_lanczos(corpus::to_grayscale(buf), 9, 8);
  PHash64 h;
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      if (small.at(c + 1, r) > small.at(c, r)) h.bits |= PHash64::mask_for(r * 8 + c);
    }
  }
  return h;
}

}  // namespace facedup::hashing
