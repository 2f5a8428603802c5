#pragma once

#include "facedup/corpus/image.hpp"

// Single-channel raster operations reproducing the reference imaging
// library's 8-bit integer arithmetic, so that downstream hash bits agree with
// the reference hashing implementation.
namespace facedup::hashing {

using corpus::PixelBuffer;

/// Separable antialiased Lanczos-3 resize (horizontal pass first, 22-bit
/// fixed-point coefficients, 8-bit intermediate). Input must be 1-channel.
PixelBuffer resize_lanczos(const PixelBuffer& gray, int out_w, int out_h);

/// Three-pass extended box blur approximating a Gaussian of the given radius.
PixelBuffer gaussian_blur(const PixelBuffer& gray, float radius = 2.0f);

/// 3x3 median with edge replication.
PixelBuffer median_filter3(const PixelBuffer& gray);

/// Crop to [x0, x1) x [y0, y1); regions outside the source are zero.
PixelBuffer crop(const PixelBuffer& gray, int x0, int y0, int x1, int y1);

}  // namespace facedup::hashing
