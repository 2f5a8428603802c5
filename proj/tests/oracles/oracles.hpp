#pragma once

// Straightforward reference computations used to cross-check the engine.
// Each one recomputes its quantity from the definition, favouring clarity
// over speed.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "facedup/align/align.hpp"
#include "facedup/corpus/image.hpp"
#include "facedup/eval/metrics.hpp"

namespace oracle {

/// DCT hash by direct double-precision cosine sums over the 32x32 Lanczos
/// thumbnail. Coefficients within `tie_eps` of the median count as equal to
/// it (and therefore not above it).
std::uint64_t phash(const facedup::corpus::PixelBuffer& rgb, double tie_eps = 1e-9);

/// Repeatedly unions any two intersecting sets until nothing changes.
std::vector<std::vector<std::string>> merge_fixpoint(std::vector<std::vector<std::string>> sets);

/// FNMR and FMR at threshold t by counting every score.
facedup::eval::Rates rates(std::span<const double> mated, std::span<const double> nonmated,
                           double t);

/// EER by sweeping every distinct score and +inf with direct counting.
double eer(std::span<const double> mated, std::span<const double> nonmated);

/// FNMR at the smallest swept threshold whose FMR is within the target.
double fnmr_at_fmr(std::span<const double> mated, std::span<const double> nonmated,
                   double target);

/// Error of the matching class after discarding whole quality groups up to
/// fraction f: the groups whose cumulative count stays within f * n.
double edc_error_at(std::span<const facedup::eval::ScoredPair> pairs, double threshold,
                    facedup::eval::EdcError kind, double f);

/// Midpoint Riemann sum of edc_error_at over [0, hi] on a grid of spacing
/// 1 / (5 n), n being the class size, divided by hi. hi * 5 n must be whole.
double pauc_riemann(std::span<const facedup::eval::ScoredPair> pairs, double threshold,
                    facedup::eval::EdcError kind, double hi);

/// Number of mated comparisons of circular pairing over subject sizes.
std::uint64_t circular_count(std::span<const std::size_t> sizes);

/// Textbook least-squares similarity via SVD of the cross-covariance with
/// the determinant sign correction.
struct Similarity {
  double scale = 0, angle = 0, tx = 0, ty = 0;
};
std::optional<Similarity> umeyama_svd(std::span<const facedup::align::Point> src,
                                      std::span<const facedup::align::Point> dst);

/// Minimizes the squared residual over a coarse-to-fine grid of scale and
/// angle; for each candidate the best translation is the centroid offset.
Similarity umeyama_grid(std::span<const facedup::align::Point> src,
                        std::span<const facedup::align::Point> dst);

/// Inverse-mapped bilinear warp into a 112x112 RGB crop, black outside.
facedup::corpus::PixelBuffer warp_bilinear(const facedup::corpus::PixelBuffer& src,
                                           const std::array<double, 6>& forward);

}  // namespace oracle
