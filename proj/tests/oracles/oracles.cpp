#include "oracles/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>

#include <opencv2/core.hpp>

#include "facedup/hashing/resample.hpp"

namespace oracle {

using facedup::corpus::PixelBuffer;
using facedup::eval::EdcError;
using facedup::eval::ScoredPair;

std::uint64_t phash(const PixelBuffer& rgb, double tie_eps) {
  PixelBuffer gray(rgb.width, rgb.height, 1);
  for (int y = 0; y < rgb.height; ++y) {
    for (int x = 0; x < rgb.width; ++x) {
      const std::uint32_t r = rgb.at(x, y, 0), g = rgb.at(x, y, 1), b = rgb.at(x, y, 2);
      gray.at(x, y) = static_cast<std::uint8_t>((r * 19595 + g * 38470 + b * 7471 + 32768) / 65536);
    }
  }
  const PixelBuffer small = facedup::hashing::resize_lanczos(gray, 32, 32);

  double coeff[8][8];
  for (int u = 0; u < 8; ++u) {
    for (int v = 0; v < 8; ++v) {
      long double sum = 0;
      for (int y = 0; y < 32; ++y) {
        for (int x = 0; x < 32; ++x) {
          sum += small.at(x, y) * std::cos(std::numbers::pi_v<long double> * u * (2 * y + 1) / 64) *
                 std::cos(std::numbers::pi_v<long double> * v * (2 * x + 1) / 64);
        }
      }
      coeff[u][v] = static_cast<double>(4 * sum);
    }
  }
  std::vector<double> flat(&coeff[0][0], &coeff[0][0] + 64);
  std::vector<double> sorted = flat;
  std::sort(sorted.begin(), sorted.end());
  const double median = (sorted[31] + sorted[32]) / 2;
  double scale = 1;
  for (double c : flat) scale = std::max(scale, std::abs(c));

  std::uint64_t bits = 0;
  for (int i = 0; i < 64; ++i) {
    if (flat[i] > median + tie_eps * scale) bits |= 1ull << (63 - i);
  }
  return bits;
}

std::vector<std::vector<std::string>> merge_fixpoint(std::vector<std::vector<std::string>> sets) {
  std::vector<std::set<std::string>> s;
  for (auto& v : sets) s.emplace_back(v.begin(), v.end());
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < s.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < s.size() && !changed; ++j) {
        bool meet = false;
        for (const auto& x : s[j]) meet = meet || s[i].count(x);
        if (meet) {
          s[i].insert(s[j].begin(), s[j].end());
          s.erase(s.begin() + j);
          changed = true;
        }
      }
    }
  }
  std::vector<std::vector<std::string>> out;
  for (auto& x : s) {
    if (x.size() >= 2) out.emplace_back(x.begin(), x.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

facedup::eval::Rates rates(std::span<const double> mated, std::span<const double> nonmated,
                           double t) {
  std::size_t fn = 0, fm = 0;
  for (double s : mated) fn += s < t;
  for (double s : nonmated) fm += s >= t;
  return {static_cast<double>(fn) / mated.size(), static_cast<double>(fm) / nonmated.size()};
}

namespace {
std::vector<double> sweep(std::span<const double> mated, std::span<const double> nonmated) {
  std::set<double> all(mated.begin(), mated.end());
  all.insert(nonmated.begin(), nonmated.end());
  std::vector<double> t(all.begin(), all.end());
  t.push_back(std::numeric_limits<double>::infinity());
  return t;
}
}  // namespace

double eer(std::span<const double> mated, std::span<const double> nonmated) {
  const auto ts = sweep(mated, nonmated);
  std::vector<facedup::eval::Rates> r;
  for (double t : ts) r.push_back(rates(mated, nonmated, t));
  // FNMR rises and FMR falls along the sweep; find the first index where
  // FNMR catches up with FMR and interpolate against the previous one.
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double diff = r[k].fnmr - r[k].fmr;
    if (diff < 0) continue;
    if (k == 0 || diff == 0) return r[k].fnmr;
    const double before = r[k - 1].fmr - r[k - 1].fnmr;
    const double w = before / (before + diff);
    return r[k - 1].fnmr + w * (r[k].fnmr - r[k - 1].fnmr);
  }
  return 1.0;
}

double fnmr_at_fmr(std::span<const double> mated, std::span<const double> nonmated,
                   double target) {
  for (double t : sweep(mated, nonmated)) {
    const auto r = rates(mated, nonmated, t);
    if (r.fmr <= target) return r.fnmr;
  }
  return 1.0;
}

double edc_error_at(std::span<const ScoredPair> pairs, double threshold, EdcError kind,
                    double f) {
  const bool mated = kind == EdcError::kFnmr;
  std::map<double, std::pair<std::size_t, std::size_t>> groups;  // quality -> (count, errors)
  std::size_t n = 0;
  for (const auto& p : pairs) {
    if (p.mated != mated) continue;
    auto& g = groups[p.pair_quality];
    ++g.first;
    g.second += mated ? p.score < threshold : p.score >= threshold;
    ++n;
  }
  std::size_t dropped = 0, left_n = n, left_err = 0;
  for (const auto& [q, g] : groups) left_err += g.second;
  for (const auto& [q, g] : groups) {
    if (static_cast<double>(dropped + g.first) > f * n) break;
    if (dropped + g.first == n) break;  // the curve keeps its last value up to 1
    dropped += g.first;
    left_n -= g.first;
    left_err -= g.second;
  }
  return static_cast<double>(left_err) / left_n;
}

double pauc_riemann(std::span<const ScoredPair> pairs, double threshold, EdcError kind,
                    double hi) {
  const bool mated = kind == EdcError::kFnmr;
  std::size_t n = 0;
  for (const auto& p : pairs) n += p.mated == mated;
  const std::size_t cells = static_cast<std::size_t>(std::llround(hi * 5.0 * n));
  const double h = 1.0 / (5.0 * n);
  double sum = 0;
  for (std::size_t k = 0; k < cells; ++k) sum += edc_error_at(pairs, threshold, kind, (k + 0.5) * h);
  return sum * h / hi;
}

std::uint64_t circular_count(std::span<const std::size_t> sizes) {
  std::uint64_t total = 0;
  for (std::size_t n : sizes) total += n > 2 ? n : (n == 2 ? 1 : 0);
  return total;
}

std::optional<Similarity> umeyama_svd(std::span<const facedup::align::Point> src,
                                      std::span<const facedup::align::Point> dst) {
  const std::size_t n = src.size();
  if (n < 2 || dst.size() != n) return std::nullopt;
  cv::Matx21d ms(0, 0), md(0, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ms += cv::Matx21d(src[i].x, src[i].y);
    md += cv::Matx21d(dst[i].x, dst[i].y);
  }
  ms *= 1.0 / n;
  md *= 1.0 / n;
  cv::Matx22d cov = cv::Matx22d::zeros();
  double var = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const cv::Matx21d a = cv::Matx21d(src[i].x, src[i].y) - ms;
    const cv::Matx21d b = cv::Matx21d(dst[i].x, dst[i].y) - md;
    cov += b * a.t();
    var += a.dot(a);
  }
  cov *= 1.0 / n;
  var /= n;
  if (var <= 0) return std::nullopt;
  cv::Matx22d u, vt;
  cv::Matx21d w;
  cv::SVD::compute(cov, w, u, vt);
  cv::Matx22d sgn = cv::Matx22d::eye();
  if (cv::determinant(u) * cv::determinant(vt) < 0) sgn(1, 1) = -1;
  const cv::Matx22d r = u * sgn * vt;
  const double scale = (w(0) * sgn(0, 0) + w(1) * sgn(1, 1)) / var;
  const cv::Matx21d t = md - scale * (r * ms);
  return Similarity{scale, std::atan2(r(1, 0), r(0, 0)), t(0), t(1)};
}

Similarity umeyama_grid(std::span<const facedup::align::Point> src,
                        std::span<const facedup::align::Point> dst) {
  const std::size_t n = src.size();
  double msx = 0, msy = 0, mdx = 0, mdy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    msx += src[i].x / n;
    msy += src[i].y / n;
    mdx += dst[i].x / n;
    mdy += dst[i].y / n;
  }
  auto cost = [&](double s, double th) {
    const double c = s * std::cos(th), d = s * std::sin(th);
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = src[i].x - msx, y = src[i].y - msy;
      const double ex = c * x - d * y - (dst[i].x - mdx);
      const double ey = d * x + c * y - (dst[i].y - mdy);
      sum += ex * ex + ey * ey;
    }
    return sum;
  };
  double best_s = 1, best_th = 0, span_s = 4, span_th = std::numbers::pi;
  for (int level = 0; level < 40; ++level) {
    double bs = best_s, bt = best_th, bc = cost(best_s, best_th);
    for (int i = -10; i <= 10; ++i) {
      for (int j = -10; j <= 10; ++j) {
        const double s = best_s + span_s * i / 10, th = best_th + span_th * j / 10;
        if (s <= 0) continue;
        const double c = cost(s, th);
        if (c < bc) {
          bc = c;
          bs = s;
          bt = th;
        }
      }
    }
    best_s = bs;
    best_th = bt;
    span_s /= 4;
    span_th /= 4;
  }
  const double c = best_s * std::cos(best_th), d = best_s * std::sin(best_th);
  return {best_s, std::remainder(best_th, 2 * std::numbers::pi), mdx - (c * msx - d * msy),
          mdy - (d * msx + c * msy)};
}

PixelBuffer warp_bilinear(const PixelBuffer& src, const std::array<double, 6>& m) {
  // Invert [a -b tx; b a ty].
  const double a = m[0], b = m[3];
  const double det = a * a + b * b;
  PixelBuffer out(facedup::align::kCropSize, facedup::align::kCropSize, 3);
  auto sample = [&](int x, int y, int c) -> double {
    if (x < 0 || y < 0 || x >= src.width || y >= src.height) return 0;
    return src.at(x, y, c);
  };
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      const double dx = x - m[2], dy = y - m[5];
      const double sx = (a * dx + b * dy) / det;
      const double sy = (-b * dx + a * dy) / det;
      const int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
      const double fx = sx - x0, fy = sy - y0;
      for (int c = 0; c < 3; ++c) {
        const double v = (1 - fx) * (1 - fy) * sample(x0, y0, c) + fx * (1 - fy) * sample(x0 + 1, y0, c) +
                         (1 - fx) * fy * sample(x0, y0 + 1, c) + fx * fy * sample(x0 + 1, y0 + 1, c);
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return out;
}

}  // namespace oracle
