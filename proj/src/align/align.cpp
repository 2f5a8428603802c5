#include "facedup/align/align.hpp"

#include <cmath>

#include <opencv2/imgproc.hpp>

#include "facedup/error.hpp"

namespace facedup::align {

bool Detection::valid() const {
  if (!(w > 0 && h > 0)) return false;
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(w) || !std::isfinite(h) ||
      !std::isfinite(confidence)) {
    return false;
  }
  for (const auto& p : landmarks) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
  }
  return true;
}

double SimilarityTransform::scale() const { return std::hypot(a, b); }
double SimilarityTransform::angle() const { return std::atan2(b, a); }

Point SimilarityTransform::apply(Point p) const {
  return {a * p.x - b * p.y + tx, b * p.x + a * p.y + ty};
}

SimilarityTransform SimilarityTransform::from(double scale, double angle, double tx,
                                              double ty) {
  return {scale * std::cos(angle), scale * std::sin(angle), tx, ty};
}

std::optional<std::size_t> select_primary_face(std::span<const Detection> detections,
                                               int image_w, int image_h) {
  if (detections.empty()) return std::nullopt;
  if (image_w <= 0 || image_h <= 0) throw Error("select_primary_face: bad image size");
  const double cx = image_w / 2.0;
  const double cy = image_h / 2.0;
  const double dist_max = std::hypot(cx, cy);
  const double area = static_cast<double>(image_w) * image_h;
  std::optional<std::size_t> best;
  double best_score = 0;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const auto& d = detections[i];
    const double dist = std::hypot(d.x + d.w / 2 - cx, d.y + d.h / 2 - cy);
    const double score = d.w * d.h / area + (1.0 - dist / dist_max) + d.confidence;
    if (!best || score > best_score) {
      best = i;
      best_score = score;
    }
  }
  return best;
}

std::optional<SimilarityTransform> umeyama_similarity(std::span<const Point> src,
                                                      std::span<const Point> dst) {
  const std::size_t n = src.size();
  if (n < 2 || dst.size() != n) return std::nullopt;
  Point ms, md;
  for (std::size_t i = 0; i < n; ++i) {
    ms.x += src[i].x;
    ms.y += src[i].y;
    md.x += dst[i].x;
    md.y += dst[i].y;
  }
  ms.x /= n;
  ms.y /= n;
  md.x /= n;
  md.y /= n;

  double sxx = 0, syy = 0, sxy = 0, dot = 0, cross = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double px = src[i].x - ms.x, py = src[i].y - ms.y;
    const double qx = dst[i].x - md.x, qy = dst[i].y - md.y;
    sxx += px * px;
    syy += py * py;
    sxy += px * py;
    dot += px * qx + py * qy;
    cross += px * qy - py * qx;
  }
  // Singular values of the centred cloud from the 2x2 scatter eigenvalues.
  const double tr = sxx + syy;
  const double disc = std::sqrt(std::max(0.0, (sxx - syy) * (sxx - syy) / 4 + sxy * sxy));
  const double sv_max = std::sqrt(std::max(0.0, tr / 2 + disc));
  const double sv_min = std::sqrt(std::max(0.0, tr / 2 - disc));
  if (sv_max <= 1e-10 || sv_min <= 1e-10 * sv_max) return std::nullopt;

  SimilarityTransform t;
  t.a = dot / tr;
  t.b = cross / tr;
  t.tx = md.x - (t.a * ms.x - t.b * ms.y);
  t.ty = md.y - (t.b * ms.x + t.a * ms.y);
  return t;
}

corpus::PixelBuffer warp_to_template(const corpus::PixelBuffer& buf,
                                     const SimilarityTransform& t) {
  if (buf.empty() || buf.channels != 3) throw Error("warp_to_template: need RGB input");
  const cv::Mat src(buf.height, buf.width, CV_8UC3, const_cast<std::uint8_t*>(buf.data.data()));
  const auto m = t.matrix();
  const cv::Mat mat(2, 3, CV_64F, const_cast<double*>(m.data()));
  corpus::PixelBuffer out(kCropSize, kCropSize, 3);
  cv::Mat dst(kCropSize, kCropSize, CV_8UC3, out.data.data());
  cv::warpAffine(src, dst, mat, dst.size(), cv::INTER_LINEAR, cv::BORDER_CONSTANT,
                 cv::Scalar::all(0));
  return out;
}

std::string_view to_string(AlignFailure f) {
  return f == AlignFailure::kNoFace ? "no_face" : "degenerate_landmarks";
}

AlignResult align_face(const corpus::PixelBuffer& buf, std::span<const Detection> detections) {
  AlignResult r;
  const auto primary = select_primary_face(detections, buf.width, buf.height);
  if (!primary) {
    r.failure = AlignFailure::kNoFace;
    return r;
  }
  const auto& lm = detections[*primary].landmarks;
  const auto t = umeyama_similarity(lm, kArcFaceTemplate);
  if (!t) {
    r.failure = AlignFailure::kDegenerateLandmarks;
    return r;
  }
  r.crop = warp_to_template(buf, *t);
  return r;
}

}  // namespace facedup::align
