#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "facedup/cli/config.hpp"

namespace facedup::cli {

// Files inside the output directory.
inline constexpr const char* kManifestFile = "manifest.tsv";
inline constexpr const char* kSkippedFilesFile = "skipped_files.tsv";
inline constexpr const char* kHashCacheFile = "hash_cache.tsv";
inline constexpr const char* kSetsFile = "sets.tsv";
inline constexpr const char* kSkipListFile = "skip_list.tsv";
inline constexpr const char* kScanReportFile = "scan_report.json";
inline constexpr const char* kRemovedFile = "removed.txt";
inline constexpr const char* kMovedFile = "moved.txt";
inline constexpr const char* kPlanFile = "plan.tsv";
inline constexpr const char* kDedupReportFile = "dedup_report.json";
inline constexpr const char* kAppliedManifestFile = "manifest_preservative.tsv";
inline constexpr const char* kRelocationsFile = "relocations.tsv";
inline constexpr const char* kMetricsFile = "metrics.tsv";
inline constexpr const char* kEvalReportFile = "eval_report.json";
inline constexpr const char* kReportFile = "report.json";

struct ScanSummary {
  std::size_t images = 0;
  std::size_t skipped_files = 0;
  std::size_t failures = 0;
  std::size_t raw_sets = 0;
  std::size_t cache_hits = 0;  // over both variants
  std::size_t hashed = 0;      // images hashed from scratch
};

/// Builds the manifest, hashes originals (and aligned crops when enabled)
/// and writes manifest, hash cache, raw sets, skip list and scan report.
ScanSummary cmd_scan(const RunConfig& config);

/// Reads the scan outputs and sidecars; writes removed/moved lists, the
/// full plan and the dedup report.
dedup::StageCounts cmd_dedup(const RunConfig& config);

/// Applies removed/moved lists to the manifest; optionally copies the
/// resulting tree to `materialize_dir`.
std::size_t cmd_apply(const RunConfig& config,
                      const std::optional<std::filesystem::path>& materialize_dir);

/// Variants: original, full, preservative. Writes metrics.tsv and the eval
/// report.
std::vector<eval::MetricsRow> cmd_eval(const RunConfig& config,
                                       const std::vector<std::string>& variants);

/// Merges the stage reports present in the output directory into report.json.
nlohmann::json cmd_report(const RunConfig& config);

}  // namespace facedup::cli
