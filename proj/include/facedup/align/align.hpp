#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "facedup/corpus/image.hpp"

namespace facedup::align {

struct Point {
  double x = 0, y = 0;
  bool operator==(const Point&) const = default;
};

/// Face detection with five landmarks: left eye, right eye, nose tip, left
/// and right mouth corner.
struct Detection {
  double x = 0, y = 0, w = 0, h = 0;  // bounding box
  double confidence = 0;
  std::array<Point, 5> landmarks{};

  bool valid() const;  // w > 0, h > 0, finite values
  bool operator==(const Detection&) const = default;
};

inline constexpr int kCropSize = 112;

/// Five-point destination template of the 112x112 ArcFace crop.
inline constexpr std::array<Point, 5> kArcFaceTemplate{{
    {38.2946, 51.6963},
    {73.5318, 51.5014},
    {56.0252, 71.7366},
    {41.5493, 92.3655},
    {70.7299, 92.2041},
}};

/// x' = a x - b y + tx, y' = b x + a y + ty, i.e. scale s = |(a, b)| and
/// rotation angle atan2(b, a). Reflections are not representable.
struct SimilarityTransform {
  double a = 1, b = 0, tx = 0, ty = 0;

  double scale() const;
  double angle() const;
  Point apply(Point p) const;
  /// Row-major 2x3 matrix.
  std::array<double, 6> matrix() const { return {a, -b, tx, b, a, ty}; }
  static SimilarityTransform from(double scale, double angle, double tx, double ty);
};

/// Index of the primary face: maximizes area / image area + (1 - distance of
/// box centre to image centre / half the image diagonal) + confidence. The
/// earliest index wins ties. nullopt when the list is empty.
std::optional<std::size_t> select_primary_face(std::span<const Detection> detections,
                                               int image_w, int image_h);

/// Least-squares similarity mapping src onto dst. nullopt when src is
/// coincident or collinear (smallest/largest singular value of the centred
/// point cloud <= 1e-10) or the sizes differ or are below 2.
std::optional<SimilarityTransform> umeyama_similarity(std::span<const Point> src,
                                                      std::span<const Point> dst);

/// 112x112 RGB crop; bilinear inverse mapping with black outside the source.
corpus::PixelBuffer warp_to_template(const corpus::PixelBuffer& buf,
                                     const SimilarityTransform& t);

enum class AlignFailure { kNoFace, kDegenerateLandmarks };
std::string_view to_string(AlignFailure f);

struct AlignResult {
  std::optional<corpus::PixelBuffer> crop;
  AlignFailure failure = AlignFailure::kNoFace;  // meaningful when !crop
};

/// Primary-face selection, landmark alignment and warping in one step.
AlignResult align_face(const corpus::PixelBuffer& buf,
                       std::span<const Detection> detections);

}  // namespace facedup::align
