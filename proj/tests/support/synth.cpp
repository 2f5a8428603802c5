#include "support/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <opencv2/imgproc.hpp>

namespace synth {

namespace {
std::uint8_t clamp8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}
}  // namespace

PixelBuffer gradient(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0, 2 * std::numbers::pi);
  std::uniform_real_distribution<double> u(0, 1);
  PixelBuffer out(w, h, 3);
  const double a = angle(rng);
  const double dx = std::cos(a), dy = std::sin(a);
  const double diag = std::hypot(w, h);
  double lo[3], span[3];
  for (int c = 0; c < 3; ++c) {
    lo[c] = 255 * u(rng);
    span[c] = (u(rng) * 2 - 1) * 255;
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double t = ((x - w / 2.0) * dx + (y - h / 2.0) * dy) / diag + 0.5;
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = clamp8(lo[c] + span[c] * t);
    }
  }
  return out;
}

PixelBuffer noise(int w, int h, std::uint64_t seed, int smooth) {
  std::mt19937_64 rng(seed);
  PixelBuffer out(w, h, 3);
  for (auto& v : out.data) v = static_cast<std::uint8_t>(rng() >> 56);
  for (int pass = 0; pass < smooth; ++pass) {
    PixelBuffer next = out;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int c = 0; c < 3; ++c) {
          int sum = 0, n = 0;
          for (int yy = std::max(0, y - 2); yy <= std::min(h - 1, y + 2); ++yy) {
            for (int xx = std::max(0, x - 2); xx <= std::min(w - 1, x + 2); ++xx) {
              sum += out.at(xx, yy, c);
              ++n;
            }
          }
          next.at(x, y, c) = static_cast<std::uint8_t>((sum + n / 2) / n);
        }
      }
    }
    out = std::move(next);
  }
  return out;
}

PixelBuffer blobs(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_real_distribution<double> u(0, 1);
  PixelBuffer out(w, h, 3);
  const int bg[3] = {byte(rng), byte(rng), byte(rng)};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = static_cast<std::uint8_t>(bg[c]);
  const int count = 2 + static_cast<int>(rng() % 5);
  for (int k = 0; k < count; ++k) {
    const double cx = u(rng) * w, cy = u(rng) * h;
    const double rx = (0.08 + 0.25 * u(rng)) * w, ry = (0.08 + 0.25 * u(rng)) * h;
    const int col[3] = {byte(rng), byte(rng), byte(rng)};
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double ex = (x - cx) / rx, ey = (y - cy) / ry;
        if (ex * ex + ey * ey <= 1)
          for (int c = 0; c < 3; ++c) out.at(x, y, c) = static_cast<std::uint8_t>(col[c]);
      }
    }
  }
  return out;
}

PixelBuffer make(Kind kind, int w, int h, std::uint64_t seed) {
  switch (kind) {
    case Kind::kGradient: return gradient(w, h, seed);
    case Kind::kNoise: return noise(w, h, seed);
    case Kind::kBlobs: return blobs(w, h, seed);
  }
  return {};
}

PixelBuffer fractal(int w, int h, std::uint64_t seed, double mean, double contrast) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> n(0, 1);
  cv::Mat acc(h, w, CV_32FC3, cv::Scalar::all(0));
  float amp = 60;
  for (int cell = 64; cell >= 4; cell /= 2) {
    cv::Mat coarse(h / cell + 2, w / cell + 2, CV_32FC3);
    for (int y = 0; y < coarse.rows; ++y) {
      for (int x = 0; x < coarse.cols; ++x) {
        const float g = n(rng);
        coarse.at<cv::Vec3f>(y, x) =
            cv::Vec3f(g + 0.3f * n(rng), g + 0.3f * n(rng), g + 0.3f * n(rng)) * amp;
      }
    }
    cv::Mat fine;
    cv::resize(coarse, fine, cv::Size(w + 2 * cell, h + 2 * cell), 0, 0, cv::INTER_CUBIC);
    acc += fine(cv::Rect(cell, cell, w, h));
    amp *= 0.6f;
  }
  PixelBuffer out(w, h, 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto v = acc.at<cv::Vec3f>(y, x);
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = clamp8(mean + contrast * v[c]);
    }
  }
  return out;
}

facedup::features::Embedding basis(std::size_t dim, std::size_t i) {
  facedup::features::Embedding e(dim, 0.0);
  e.at(i) = 1.0;
  return e;
}

facedup::features::Embedding tilt(std::size_t dim, std::size_t u, std::size_t v, double cos) {
  facedup::features::Embedding e(dim, 0.0);
  e.at(u) = cos;
  e.at(v) = std::sqrt(1 - cos * cos);
  return e;
}

}  // namespace synth
