#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "facedup/corpus/manifest.hpp"
#include "facedup/eval/metrics.hpp"
#include "facedup/features/features.hpp"

namespace facedup::eval {

struct EvalConfig {
  std::uint64_t seed = 1;
  double edc_fmr = 1e-3;  // operating point fixing the EDC comparison threshold
  double pauc_hi = 0.2;
  unsigned workers = 1;
};

struct MetricsRow {
  std::string dataset;
  std::string variant;
  std::size_t images = 0;
  std::size_t mated = 0;
  std::size_t nonmated = 0;
  double eer = 0;
  double fnmr_at_1e3 = 0;
  double fnmr_at_1e2 = 0;
  double pauc_fnmr = 0;
  double pauc_fmr = 0;
  double edc_threshold = 0;
};

struct PairSet {
  std::vector<std::string> image_ids;  // evaluated images, manifest order
  std::vector<ScoredPair> pairs;       // mated first, then non-mated
};

/// Circular mated pairs per subject plus as many sampled non-mated pairs,
/// scored by cosine similarity with pair quality = min of both qualities.
/// Images in `excluded` are left out. Features are looked up under
/// `feature_alias[image_id]` when present (relocated images). Throws
/// DataError listing every image without an embedding or quality.
PairSet build_pairs(const corpus::Manifest& manifest, const std::string& dataset_id,
                    const features::FeatureStore& store, const std::set<std::string>& excluded,
                    const EvalConfig& config,
                    const std::map<std::string, std::string>& feature_alias = {});

MetricsRow compute_metrics(const PairSet& pairs, const EvalConfig& config);

/// One row per dataset of the manifest.
std::vector<MetricsRow> evaluate(const corpus::Manifest& manifest, const std::string& variant,
                                 const features::FeatureStore& store,
                                 const std::set<std::string>& excluded, const EvalConfig& config,
                                 const std::map<std::string, std::string>& feature_alias = {});

/// Tab-separated with a header line:
/// dataset variant eer fnmr@1e-3 fnmr@1e-2 pauc_fnmr pauc_fmr
void write_metrics(std::ostream& out, const std::vector<MetricsRow>& rows);

}  // namespace facedup::eval
