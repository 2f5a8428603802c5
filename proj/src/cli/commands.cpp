#include "facedup/cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "facedup/align/aligned_content.hpp"
#include "facedup/corpus/source.hpp"
#include "facedup/error.hpp"
#include "facedup/features/features.hpp"
#include "facedup/text.hpp"

namespace facedup::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out.flush()) throw IoError("cannot write " + path.string());
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string() + " (has the previous stage run?)");
  return in;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

corpus::Manifest load_manifest(const RunConfig& c) {
  auto in = open_input(c.output_dir / kManifestFile);
  return corpus::read_manifest(in);
}

std::vector<hashing::RawDupSet> load_sets(const RunConfig& c) {
  auto in = open_input(c.output_dir / kSetsFile);
  return hashing::read_sets(in);
}

features::FeatureStore load_features(const RunConfig& c, std::size_t* warnings_out = nullptr) {
  std::vector<std::string> warnings;
  auto store = features::load_sidecars(c.sidecars, &warnings);
  for (const auto& w : warnings) spdlog::warn("{}", w);
  if (warnings_out) *warnings_out = warnings.size();
  return store;
}

// image_id -> reason
std::map<std::string, std::string> load_skip_list(const RunConfig& c) {
  std::map<std::string, std::string> out;
  const auto path = c.output_dir / kSkipListFile;
  if (!fs::exists(path)) return out;
  auto in = open_input(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = text::split(line, '\t');
    if (f.size() != 2) throw DataError(path.string() + ": malformed line");
    out.emplace(f[0], f[1]);
  }
  return out;
}

json counts_json(const std::map<std::string, dedup::DuplicateCounts>& counts) {
  json j = json::object();
  for (const auto& [d, c] : counts) {
    j[d] = {{"images", c.images},
            {"subjects", c.subjects},
            {"intra", c.intra},
            {"subjects_with_intra", c.subjects_with_intra},
            {"inter", c.inter},
            {"subjects_with_inter", c.subjects_with_inter},
            {"intra_inter_overlap", c.overlap},
            {"combined", c.combined}};
  }
  return j;
}

}  // namespace

ScanSummary cmd_scan(const RunConfig& config) {
  if (config.datasets.empty()) throw ConfigError("no datasets configured");
  ScanSummary summary;
  corpus::ManifestOptions options;
  for (const auto& d : config.datasets) {
    if (d.exclude_list) options.excluded[d.id] = corpus::read_path_list(*d.exclude_list);
  }
  const auto build = corpus::build_manifest(config.roots(), options);
  const auto& manifest = build.manifest;
  summary.images = manifest.size();
  summary.skipped_files = build.skipped.size();
  spdlog::info("manifest: {} images, {} subjects, {} files skipped", manifest.size(),
               manifest.subject_count(), build.skipped.size());
  {
    std::ostringstream m, s;
    corpus::write_manifest(m, manifest);
    for (const auto& k : build.skipped) s << k.dataset_id << '\t' << k.rel_path << '\t' << k.reason << '\n';
    write_text(config.output_dir / kManifestFile, m.str());
    write_text(config.output_dir / kSkippedFilesFile, s.str());
  }

  hashing::HashCache cache(hashing::hash_algorithm_version(config.scan));
  const auto cache_path = config.output_dir / kHashCacheFile;
  if (fs::exists(cache_path)) {
    std::ifstream in(cache_path, std::ios::binary);
    if (!cache.load(in)) spdlog::info("hash cache version changed, recomputing");
  }

  const corpus::FileSource source(config.roots());
  const hashing::OriginalContent original(source);
  std::map<std::string, std::string> skips;

  const auto scan_variant = [&](const hashing::ContentProvider& provider,
                                hashing::ImageVariant variant) {
    auto scan = hashing::compute_hashes(manifest, provider, variant, config.scan, &cache);
    summary.cache_hits += scan.cache_hits;
    summary.hashed += scan.images.size() - scan.cache_hits;
    for (const auto& f : scan.failures) {
      spdlog::warn("{} ({}): {}", f.image_id, f.reason, f.detail);
      skips.emplace(f.image_id, f.reason);
    }
    const auto reader = [&](const std::string& id) {
      return provider.identity_bytes(manifest.at(id));
    };
    return std::pair{hashing::find_duplicate_sets(scan, reader, config.scan), scan.failures.size()};
  };

  auto [sets, failures] = scan_variant(original, hashing::ImageVariant::kOriginal);
  std::size_t preprocessed_failures = 0;
  if (config.preprocessed) {
    if (config.sidecars.empty()) throw ConfigError("the preprocessed pass needs sidecars");
    const auto store = load_features(config);
    const align::AlignedContent aligned(source, store, config.aligned_dir);
    auto [more, f2] = scan_variant(aligned, hashing::ImageVariant::kPreprocessed);
    preprocessed_failures = f2;
    sets.insert(sets.end(), more.begin(), more.end());
    std::sort(sets.begin(), sets.end());
  }
  summary.failures = skips.size();
  summary.raw_sets = sets.size();

  {
    std::ostringstream c, s, k;
    cache.write(c);
    hashing::write_sets(s, sets);
    for (const auto& [id, reason] : skips) k << id << '\t' << reason << '\n';
    write_text(cache_path, c.str());
    write_text(config.output_dir / kSetsFile, s.str());
    write_text(config.output_dir / kSkipListFile, k.str());
  }

  std::map<std::string, std::size_t> by_source;
  for (const auto& s : sets) {
    ++by_source[std::string(hashing::to_string(s.variant)) + "/" +
                std::string(hashing::to_string(s.source))];
  }
  std::map<std::string, std::size_t> skip_reasons;
  for (const auto& [id, reason] : skips) ++skip_reasons[reason];
  std::map<std::string, std::size_t> skipped_file_reasons;
  for (const auto& k : build.skipped) ++skipped_file_reasons[k.reason];

  json report{
      {"config", config.to_json()},
      {"digest_algorithm", hashing::kDigestAlgorithm},
      {"hash_algorithm_version", hashing::hash_algorithm_version(config.scan)},
      {"crop_resistant_candidates", "all pairs sharing a segment hash within the bit-error cutoff"},
      {"images", manifest.size()},
      {"subjects", manifest.subject_count()},
      {"skipped_files", skipped_file_reasons},
      {"skip_list", skip_reasons},
      {"original_failures", failures},
      {"preprocessed_failures", preprocessed_failures},
      {"raw_sets", by_source},
      {"duplicate_counts", counts_json(dedup::count_duplicates(manifest, sets))},
  };
  write_json(config.output_dir / kScanReportFile, report);
  spdlog::info("scan: {} raw sets, {} cache hits, {} hashed, {} skipped", sets.size(),
               summary.cache_hits, summary.hashed, skips.size());
  return summary;
}

dedup::StageCounts cmd_dedup(const RunConfig& config) {
  const auto manifest = load_manifest(config);
  const auto sets = load_sets(config);
  std::size_t warnings = 0;
  if (config.sidecars.empty()) spdlog::warn("no sidecars configured; no image has features");
  const auto store = load_features(config, &warnings);
  const auto plan = dedup::build_plan(manifest, sets, store, config.dedup);

  std::ostringstream removed, moved, full;
  dedup::write_removed(removed, plan);
  dedup::write_moved(moved, plan);
  dedup::write_plan(full, plan);
  write_text(config.output_dir / kRemovedFile, removed.str());
  write_text(config.output_dir / kMovedFile, moved.str());
  write_text(config.output_dir / kPlanFile, full.str());

  const auto& c = plan.counts;
  json by_dataset = json::object();
  for (const auto& [d, rm] : plan.removed_moved_by_dataset) {
    by_dataset[d] = {{"removed", rm.first}, {"moved", rm.second}};
  }
  json report{
      {"config", config.to_json()},
      {"primary_face_score", "bbox area / image area + (1 - centre distance / half diagonal) + confidence"},
      {"duplicate_counts", counts_json(dedup::count_duplicates(manifest, sets))},
      {"stages",
       {{"raw_sets", c.raw_sets},
        {"merged_sets", c.merged_sets},
        {"merged_members", c.merged_members},
        {"exact_intra_sets", c.exact_intra_sets},
        {"fp_ejected", c.fp_ejected},
        {"fp_dissolved_sets", c.fp_dissolved_sets},
        {"resolved_intra_sets", c.resolved_intra_sets},
        {"resolved_inter_sets", c.resolved_inter_sets},
        {"inter_kept", c.inter_kept},
        {"inter_moved", c.inter_moved},
        {"inter_removed_no_candidates", c.inter_removed_no_candidates},
        {"inter_removed_no_embedding", c.inter_removed_no_embedding},
        {"inter_removed_below_threshold", c.inter_removed_below_threshold},
        {"inter_removed_margin", c.inter_removed_margin},
        {"move_collisions", c.move_collisions},
        {"moves_alongside_target_removals", c.moves_alongside_target_removals}}},
      {"totals", {{"removed", c.removed}, {"moved", c.moved}, {"kept", c.kept}}},
      {"by_dataset", by_dataset},
      {"sidecar_warnings", warnings},
  };
  write_json(config.output_dir / kDedupReportFile, report);
  spdlog::info("dedup: {} merged sets, removed {}, moved {}", c.merged_sets, c.removed, c.moved);
  return c;
}

namespace {

dedup::PlanLists load_plan_lists(const RunConfig& config) {
  auto removed = open_input(config.output_dir / kRemovedFile);
  auto moved = open_input(config.output_dir / kMovedFile);
  return dedup::read_plan_lists(removed, moved);
}

}  // namespace

std::size_t cmd_apply(const RunConfig& config, const std::optional<fs::path>& materialize_dir) {
  const auto manifest = load_manifest(config);
  const auto applied = dedup::apply_plan(manifest, load_plan_lists(config));
  std::ostringstream m, r;
  corpus::write_manifest(m, applied.manifest);
  for (const auto& rel : applied.relocations) {
    r << rel.dataset_id << '\t' << rel.old_rel_path << '\t' << rel.new_rel_path << '\n';
  }
  write_text(config.output_dir / kAppliedManifestFile, m.str());
  write_text(config.output_dir / kRelocationsFile, r.str());
  if (materialize_dir) dedup::materialize(applied, config.roots(), *materialize_dir);
  spdlog::info("apply: {} of {} images remain", applied.manifest.size(), manifest.size());
  return applied.manifest.size();
}

std::vector<eval::MetricsRow> cmd_eval(const RunConfig& config,
                                       const std::vector<std::string>& variants) {
  const auto manifest = load_manifest(config);
  const auto store = load_features(config);
  const auto skips = load_skip_list(config);

  std::set<std::string> excluded;
  for (const auto& [id, reason] : skips) excluded.insert(id);
  // Images the provider found no face in are landmark failures as well.
  for (const auto& r : manifest.records()) {
    const auto& f = store.get(r.image_id);
    if (!f.detections || f.detections->empty()) excluded.insert(r.image_id);
  }

  std::vector<eval::MetricsRow> rows;
  json details = json::array();
  for (const auto& v : variants) {
    std::vector<eval::MetricsRow> part;
    if (v == "original") {
      part = eval::evaluate(manifest, v, store, excluded, config.eval);
    } else if (v == "full") {
      auto ex = excluded;
      for (const auto& s : load_sets(config)) ex.insert(s.members.begin(), s.members.end());
      part = eval::evaluate(manifest, v, store, ex, config.eval);
    } else if (v == "preservative") {
      const auto applied = dedup::apply_plan(manifest, load_plan_lists(config));
      std::map<std::string, std::string> alias;
      auto ex = excluded;
      for (const auto& rel : applied.relocations) {
        const auto new_id = corpus::make_image_id(rel.dataset_id, rel.new_rel_path);
        const auto old_id = corpus::make_image_id(rel.dataset_id, rel.old_rel_path);
        alias[new_id] = old_id;
        if (excluded.count(old_id)) ex.insert(new_id);
      }
      part = eval::evaluate(applied.manifest, v, store, ex, config.eval, alias);
    } else {
      throw ConfigError("unknown evaluation variant: " + v);
    }
    for (auto& r : part) {
      details.push_back({{"dataset", r.dataset},
                         {"variant", r.variant},
                         {"images", r.images},
                         {"mated_pairs", r.mated},
                         {"nonmated_pairs", r.nonmated},
                         {"eer", r.eer},
                         {"fnmr@1e-3", r.fnmr_at_1e3},
                         {"fnmr@1e-2", r.fnmr_at_1e2},
                         {"pauc_fnmr", r.pauc_fnmr},
                         {"pauc_fmr", r.pauc_fmr},
                         {"edc_threshold", std::isinf(r.edc_threshold) ? json("inf")
                                                                       : json(r.edc_threshold)}});
      rows.push_back(std::move(r));
    }
  }
  std::ostringstream m;
  eval::write_metrics(m, rows);
  write_text(config.output_dir / kMetricsFile, m.str());
  write_json(config.output_dir / kEvalReportFile,
             {{"config", config.to_json()},
              {"edc_threshold_rule", "FMR operating point of the undiscarded comparisons"},
              {"edc_pair_quality", "minimum of the two image qualities"},
              {"nonmated_sampling", "resampled per variant with the configured seed"},
              {"excluded_images", excluded.size()},
              {"rows", details}});
  return rows;
}

json cmd_report(const RunConfig& config) {
  json report{{"config", config.to_json()}};
  for (const auto& [key, file] : {std::pair{"scan", kScanReportFile},
                                  std::pair{"dedup", kDedupReportFile},
                                  std::pair{"eval", kEvalReportFile}}) {
    const auto path = config.output_dir / file;
    if (!fs::exists(path)) continue;
    auto in = open_input(path);
    try {
      auto j = json::parse(in);
      j.erase("config");
      report[key] = std::move(j);
    } catch (const json::exception& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }
  write_json(config.output_dir / kReportFile, report);
  return report;
}

}  // namespace facedup::cli
