#include "facedup/hashing/resample.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "facedup/error.hpp"

namespace facedup::hashing {
namespace {

constexpr int kPrecisionBits = 32 - 8 - 2;
constexpr double kLanczosSupport = 3.0;

double sinc(double x) {
  if (x == 0.0) return 1.0;
  x *= std::numbers::pi;
  return std::sin(x) / x;
}

double lanczos(double x) {
  if (-3.0 <= x && x < 3.0) return sinc(x) * sinc(x / 3.0);
  return 0.0;
}

struct Coefficients {
  int ksize = 0;
  std::vector<int> bounds;  // (first source index, count) per output index
  std::vector<std::int32_t> weights;  // ksize per output index
};

Coefficients precompute(int in_size, int out_size) {
  const double scale = static_cast<double>(in_size) / out_size;
  const double filterscale = std::max(scale, 1.0);
  const double support = kLanczosSupport * filterscale;
  Coefficients c;
  c.ksize = static_cast<int>(std::ceil(support)) * 2 + 1;
  c.bounds.resize(2 * static_cast<std::size_t>(out_size));
  c.weights.assign(static_cast<std::size_t>(out_size) * c.ksize, 0);
  std::vector<double> k(c.ksize);
  for (int xx = 0; xx < out_size; ++xx) {
    const double center = (xx + 0.5) * scale;
    const double ss = 1.0 / filterscale;
    int xmin = static_cast<int>(center - support + 0.5);
    if (xmin < 0) xmin = 0;
    int xmax = static_cast<int>(center + support + 0.5);
    if (xmax > in_size) xmax = in_size;
    xmax -= xmin;
    double ww = 0.0;
    for (int x = 0; x < xmax; ++x) {
      const double w = lanczos((x + xmin - center + 0.5) * ss);
      k[x] = w;
      ww += w;
    }
    for (int x = 0; x < xmax; ++x) {
      if (ww != 0.0) k[x] /= ww;
    }
    for (int x = xmax; x < c.ksize; ++x) k[x] = 0.0;
    for (int x = 0; x < c.ksize; ++x) {
      const double scaled = k[x] * (1 << kPrecisionBits);
      c.weights[static_cast<std::size_t>(xx) * c.ksize + x] =
          static_cast<std::int32_t>(k[x] < 0 ? -0.5 + scaled : 0.5 + scaled);
    }
    c.bounds[2 * xx] = xmin;
    c.bounds[2 * xx + 1] = xmax;
  }
  return c;
}

std::uint8_t clip8(std::int32_t in) {
  if (in >= (1 << kPrecisionBits << 8)) return 255;
  if (in <= 0) return 0;
  return static_cast<std::uint8_t>(in >> kPrecisionBits);
}

void require_gray(const PixelBuffer& b, const char* op) {
  if (b.channels != 1) throw Error(std::string(op) + ": expected a 1-channel buffer");
  if (b.empty()) throw Error(std::string(op) + ": empty buffer");
}

}  // namespace

PixelBuffer resize_lanczos(const PixelBuffer& gray, int out_w, int out_h) {
  require_gray(gray, "resize_lanczos");
  if (out_w <= 0 || out_h <= 0) throw Error("resize_lanczos: bad target size");
  const bool need_h = out_w != gray.width;
  const bool need_v = out_h != gray.height;
  if (!need_h && !need_v) return gray;

  const Coefficients horiz = precompute(gray.width, out_w);
  Coefficients vert = precompute(gray.height, out_h);

  PixelBuffer current = gray;
  if (need_h) {
    // Only rows used by the vertical pass are resampled horizontally.
    const int first = vert.bounds[0];
    const int last = vert.bounds[2 * out_h - 2] + vert.bounds[2 * out_h - 1];
    for (int i = 0; i < out_h; ++i) vert.bounds[2 * i] -= first;
    PixelBuffer tmp(out_w, last - first, 1);
    for (int yy = 0; yy < tmp.height; ++yy) {
      const std::uint8_t* row = &gray.data[static_cast<std::size_t>(yy + first) * gray.width];
      for (int xx = 0; xx < out_w; ++xx) {
        const int xmin = horiz.bounds[2 * xx];
        const int xmax = horiz.bounds[2 * xx + 1];
        const std::int32_t* k = &horiz.weights[static_cast<std::size_t>(xx) * horiz.ksize];
        std::int32_t ss = 1 << (kPrecisionBits - 1);
        for (int x = 0; x < xmax; ++x) ss += row[x + xmin] * k[x];
        tmp.data[static_cast<std::size_t>(yy) * out_w + xx] = clip8(ss);
      }
    }
    current = std::move(tmp);
  }
  if (need_v) {
    PixelBuffer out(current.width, out_h, 1);
    for (int yy = 0; yy < out_h; ++yy) {
      const int ymin = vert.bounds[2 * yy];
      const int ymax = vert.bounds[2 * yy + 1];
      const std::int32_t* k = &vert.weights[static_cast<std::size_t>(yy) * vert.ksize];
      for (int xx = 0; xx < current.width; ++xx) {
        std::int32_t ss = 1 << (kPrecisionBits - 1);
        for (int y = 0; y < ymax; ++y) {
          ss += current.data[static_cast<std::size_t>(y + ymin) * current.width + xx] * k[y];
        }
        out.data[static_cast<std::size_t>(yy) * out.width + xx] = clip8(ss);
      }
    }
    current = std::move(out);
  }
  return current;
}

namespace {

// Box radius whose three-pass iteration approximates the Gaussian variance;
// single-precision arithmetic is part of the reference behaviour.
float box_radius_for_gaussian(float radius, int passes) {
  const float sigma2 = radius * radius / static_cast<float>(passes);
  const float big_l = static_cast<float>(std::sqrt(12.0 * sigma2 + 1.0));
  const float l = static_cast<float>(std::floor((big_l - 1.0) / 2.0));
  float a = (2 * l + 1) * (l * (l + 1) - 3 * sigma2);
  a /= 6 * (sigma2 - (l + 1) * (l + 1));
  return l + a;
}

void box_blur_line(std::uint8_t* out, const std::uint8_t* in, int lastx, int radius,
                   int edge_a, int edge_b, std::uint32_t ww, std::uint32_t fw) {
  std::uint32_t acc = in[0] * static_cast<std::uint32_t>(radius + 1);
  std::uint32_t bulk;
  for (int x = 0; x < edge_a - 1; ++x) acc += in[x];
  acc += in[lastx] * static_cast<std::uint32_t>(radius - edge_a + 1);

  auto move_acc = [&](int subtract, int add) {
    acc += static_cast<std::uint32_t>(in[add] - in[subtract]);
  };
  auto add_far = [&](int left, int right) {
    bulk = acc * ww + static_cast<std::uint32_t>(in[left] + in[right]) * fw;
  };
  auto save = [&](int x) {
    out[x] = static_cast<std::uint8_t>((bulk + (1u << 23)) >> 24);
  };

  if (edge_a <= edge_b) {
    for (int x = 0; x < edge_a; ++x) {
      move_acc(0, x + radius);
      add_far(0, x + radius + 1);
      save(x);
    }
    for (int x = edge_a; x < edge_b; ++x) {
      move_acc(x - radius - 1, x + radius);
      add_far(x - radius - 1, x + radius + 1);
      save(x);
    }
    for (int x = edge_b; x <= lastx; ++x) {
      move_acc(x - radius - 1, lastx);
      add_far(x - radius - 1, lastx);
      save(x);
    }
  } else {
    for (int x = 0; x < edge_b; ++x) {
      move_acc(0, x + radius);
      add_far(0, lastx);
      save(x);
    }
    for (int x = edge_b; x < edge_a; ++x) {
      move_acc(0, lastx);
      add_far(0, lastx);
      save(x);
    }
    for (int x = edge_a; x <= lastx; ++x) {
      move_acc(x - radius - 1, lastx);
      add_far(x - radius - 1, lastx);
      save(x);
    }
  }
}

void horizontal_box_blur(PixelBuffer& img, float float_radius) {
  const int radius = static_cast<int>(float_radius);
  const std::uint32_t ww =
      static_cast<std::uint32_t>(static_cast<float>(1u << 24) / (float_radius * 2 + 1));
  const std::uint32_t fw = ((1u << 24) - (radius * 2 + 1) * ww) / 2;
  const int edge_a = std::min(radius + 1, img.width);
  const int edge_b = std::max(img.width - radius - 1, 0);
  std::vector<std::uint8_t> line(img.width);
  for (int y = 0; y < img.height; ++y) {
    std::uint8_t* row = &img.data[static_cast<std::size_t>(y) * img.width];
    box_blur_line(line.data(), row, img.width - 1, radius, edge_a, edge_b, ww, fw);
    std::copy(line.begin(), line.end(), row);
  }
}

PixelBuffer transpose(const PixelBuffer& img) {
  PixelBuffer out(img.height, img.width, 1);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) out.at(y, x) = img.at(x, y);
  }
  return out;
}

}  // namespace

PixelBuffer gaussian_blur(const PixelBuffer& gray, float radius) {
  require_gray(gray, "gaussian_blur");
  if (radius == 0.0f) return gray;
  constexpr int kPasses = 3;
  const float box = box_radius_for_gaussian(radius, kPasses);
  PixelBuffer img = gray;
  for (int i = 0; i < kPasses; ++i) horizontal_box_blur(img, box);
  PixelBuffer t = transpose(img);
  for (int i = 0; i < kPasses; ++i) horizontal_box_blur(t, box);
  return transpose(t);
}

PixelBuffer median_filter3(const PixelBuffer& gray) {
  require_gray(gray, "median_filter3");
  PixelBuffer out(gray.width, gray.height, 1);
  std::array<std::uint8_t, 9> window;
  for (int y = 0; y < gray.height; ++y) {
    for (int x = 0; x < gray.width; ++x) {
      int n = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        const int yy = std::clamp(y + dy, 0, gray.height - 1);
        for (int dx = -1; dx <= 1; ++dx) {
          const int xx = std::clamp(x + dx, 0, gray.width - 1);
          window[n++] = gray.at(xx, yy);
        }
      }
      std::nth_element(window.begin(), window.begin() + 4, window.end());
      out.at(x, y) = window[4];
    }
  }
  return out;
}

PixelBuffer crop(const PixelBuffer& gray, int x0, int y0, int x1, int y1) {
  require_gray(gray, "crop");
  PixelBuffer out(std::max(x1 - x0, 0), std::max(y1 - y0, 0), 1);
  for (int y = 0; y < out.height; ++y) {
    const int sy = y + y0;
    if (sy < 0 || sy >= gray.height) continue;
    for (int x = 0; x < out.width; ++x) {
      const int sx = x + x0;
      if (sx >= 0 && sx < gray.width) out.at(x, y) = gray.at(sx, sy);
    }
  }
  return out;
}

}  // namespace facedup::hashing
