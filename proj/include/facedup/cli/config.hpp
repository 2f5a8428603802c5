#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "facedup/corpus/manifest.hpp"
#include "facedup/dedup/dedup.hpp"
#include "facedup/eval/evaluate.hpp"
#include "facedup/hashing/duplicates.hpp"

namespace facedup::cli {

struct DatasetConfig {
  std::string id;
  std::filesystem::path root;
  std::optional<std::filesystem::path> exclude_list;  // dataset-relative paths
};

struct RunConfig {
  std::vector<DatasetConfig> datasets;
  std::filesystem::path output_dir = "facedup-out";
  unsigned workers = 1;
  hashing::ScanConfig scan;
  bool preprocessed = false;  // also scan aligned crops
  std::optional<std::filesystem::path> aligned_dir;  // write aligned crops as PNG
  std::vector<std::filesystem::path> sidecars;
  dedup::DedupConfig dedup;
  eval::EvalConfig eval;

  /// Unknown keys and type mismatches raise ConfigError.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& file);

  /// Effective configuration. Worker count and output locations are left
  /// out because no result depends on them.
  nlohmann::json to_json() const;

  /// Propagates `workers` into the stage configs and range-checks values.
  void finalize();

  std::vector<corpus::DatasetRoot> roots() const;
};

}  // namespace facedup::cli
