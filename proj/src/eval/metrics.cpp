#include "facedup/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <unordered_map>

#include "facedup/error.hpp"

namespace facedup::eval {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Unbiased integer in [0, n) by rejection; the standard distributions are
// not specified bit-for-bit across library implementations.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  for (;;) {
    const std::uint64_t x = rng();
    if (x < limit) return x % n;
  }
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> circular_mated_pairs(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (n < 2) return out;
  for (std::size_t i = 0; i + 1 < n; ++i) out.emplace_back(i, i + 1);
  if (n > 2) out.emplace_back(n - 1, 0);
  return out;
}

std::uint64_t count_cross_pairs(std::span<const std::size_t> labels) {
  std::unordered_map<std::size_t, std::uint64_t> sizes;
  for (std::size_t l : labels) ++sizes[l];
  const std::uint64_t m = labels.size();
  std::uint64_t same = 0;
  for (const auto& [l, c] : sizes) same += c * (c - 1) / 2;
  return m * (m - 1) / 2 - same;
}

std::vector<std::pair<std::size_t, std::size_t>> sample_nonmated(
    std::span<const std::size_t> labels, std::size_t n, std::uint64_t seed) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (n == 0) return out;
  const std::uint64_t total = count_cross_pairs(labels);
  if (total < n) {
    throw DataError("cannot sample " + std::to_string(n) + " non-mated pairs, only " +
                    std::to_string(total) + " exist");
  }
  std::mt19937_64 rng(seed);
  if (total <= 4 * static_cast<std::uint64_t>(n)) {
    // Dense request: enumerate and partially shuffle.
    std::vector<std::pair<std::size_t, std::size_t>> all;
    all.reserve(total);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      for (std::size_t j = i + 1; j < labels.size(); ++j) {
        if (labels[i] != labels[j]) all.emplace_back(i, j);
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t r = k + uniform_below(rng, all.size() - k);
      std::swap(all[k], all[r]);
    }
    out.assign(all.begin(), all.begin() + n);
  } else {
    std::set<std::pair<std::size_t, std::size_t>> seen;
    const std::uint64_t m = labels.size();
    while (out.size() < n) {
      std::size_t i = uniform_below(rng, m);
      std::size_t j = uniform_below(rng, m);
      if (labels[i] == labels[j]) continue;
      if (i > j) std::swap(i, j);
      if (seen.emplace(i, j).second) out.emplace_back(i, j);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

ScoreSets::ScoreSets(std::vector<double> mated, std::vector<double> nonmated)
    : mated_(std::move(mated)), nonmated_(std::move(nonmated)) {
  for (double v : mated_) {
    if (std::isnan(v)) throw DataError("NaN score");
  }
  for (double v : nonmated_) {
    if (std::isnan(v)) throw DataError("NaN score");
  }
  std::sort(mated_.begin(), mated_.end());
  std::sort(nonmated_.begin(), nonmated_.end());
}

namespace {
std::pair<std::vector<double>, std::vector<double>> split(std::span<const ScoredPair> pairs) {
  std::vector<double> m, n;
  for (const auto& p : pairs) (p.mated ? m : n).push_back(p.score);
  return {std::move(m), std::move(n)};
}
}  // namespace

ScoreSets::ScoreSets(std::span<const ScoredPair> pairs) {
  auto [m, n] = split(pairs);
  *this = ScoreSets(std::move(m), std::move(n));
}

Rates ScoreSets::at(double t) const {
  Rates r;
  if (!mated_.empty()) {
    const auto below = std::lower_bound(mated_.begin(), mated_.end(), t) - mated_.begin();
    r.fnmr = static_cast<double>(below) / mated_.size();
  }
  if (!nonmated_.empty()) {
    const auto below = std::lower_bound(nonmated_.begin(), nonmated_.end(), t) - nonmated_.begin();
    r.fmr = static_cast<double>(nonmated_.size() - below) / nonmated_.size();
  }
  return r;
}

std::vector<double> ScoreSets::candidate_thresholds() const {
  std::vector<double> t;
  t.reserve(mated_.size() + nonmated_.size() + 1);
  std::merge(mated_.begin(), mated_.end(), nonmated_.begin(), nonmated_.end(),
             std::back_inserter(t));
  t.erase(std::unique(t.begin(), t.end()), t.end());
  t.push_back(kInf);
  return t;
}

double eer(const ScoreSets& s) {
  if (s.mated_count() == 0 || s.nonmated_count() == 0) {
    throw DataError("EER needs mated and non-mated scores");
  }
  const auto ts = s.candidate_thresholds();
  Rates prev = s.at(ts.front());
  if (prev.fnmr >= prev.fmr) return prev.fnmr;
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const Rates cur = s.at(ts[k]);
    if (cur.fnmr >= cur.fmr) {
      if (cur.fnmr == cur.fmr) return cur.fnmr;
      const double d0 = prev.fmr - prev.fnmr;  // > 0
      const double d1 = cur.fnmr - cur.fmr;    // > 0
      const double alpha = d0 / (d0 + d1);
      return prev.fnmr + alpha * (cur.fnmr - prev.fnmr);
    }
    prev = cur;
  }
  return prev.fnmr;  // unreachable: at +infinity FNMR = 1 >= FMR = 0
}

OperatingPoint fnmr_at_fmr(const ScoreSets& s, double target) {
  if (s.mated_count() == 0 || s.nonmated_count() == 0) {
    throw DataError("FNMR@FMR needs mated and non-mated scores");
  }
  OperatingPoint op;
  op.target_below_resolution = target < 1.0 / static_cast<double>(s.nonmated_count());
  for (double t : s.candidate_thresholds()) {
    const Rates r = s.at(t);
    if (r.fmr <= target) {
      op.threshold = t;
      op.fnmr = r.fnmr;
      op.fmr = r.fmr;
      return op;
    }
  }
  return op;  // unreachable: FMR(+infinity) = 0
}

std::vector<EdcPoint> edc(std::span<const ScoredPair> pairs, double threshold, EdcError kind) {
  const bool want_mated = kind == EdcError::kFnmr;
  std::vector<std::pair<double, bool>> items;  // (quality, is_error)
  for (const auto& p : pairs) {
    if (p.mated != want_mated) continue;
    if (std::isnan(p.pair_quality)) throw DataError("EDC pair quality is NaN");
    const bool error = want_mated ? p.score < threshold : p.score >= threshold;
    items.emplace_back(p.pair_quality, error);
  }
  std::vector<EdcPoint> curve;
  if (items.empty()) return curve;
  std::sort(items.begin(), items.end());
  const std::size_t n = items.size();
  std::size_t errors = 0;
  for (const auto& it : items) errors += it.second;

  double error = static_cast<double>(errors) / n;
  curve.push_back({0.0, error});
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && items[j].first == items[i].first) errors -= items[j++].second;
    const double f = static_cast<double>(j) / n;
    if (j == n) {
      curve.push_back({1.0, error});
      break;
    }
    curve.push_back({f, error});
    error = static_cast<double>(errors) / (n - j);
    curve.push_back({f, error});
    i = j;
  }
  return curve;
}

double pauc(std::span<const EdcPoint> curve, double lo, double hi) {
  if (!(hi > lo)) throw DataError("pAUC range is empty");
  if (curve.empty() || lo < curve.front().discard || hi > curve.back().discard) {
    throw DataError("pAUC range outside the curve");
  }
  double area = 0;
  for (std::size_t k = 0; k + 1 < curve.size(); ++k) {
    const auto& p = curve[k];
    const auto& q = curve[k + 1];
    const double x0 = std::max(lo, p.discard);
    const double x1 = std::min(hi, q.discard);
    if (x1 <= x0) continue;
    const double w = q.discard - p.discard;
    auto y = [&](double x) { return p.error + (q.error - p.error) * (x - p.discard) / w; };
    area += (x1 - x0) * (y(x0) + y(x1)) / 2;
  }
  return area / (hi - lo);
}

}  // namespace facedup::eval
