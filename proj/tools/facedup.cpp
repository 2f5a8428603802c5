// facedup: duplicate detection, preservative deduplication and evaluation
// for face-image datasets.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "facedup/cli/commands.hpp"
#include "facedup/corpus/image.hpp"
#include "facedup/corpus/source.hpp"
#include "facedup/error.hpp"
#include "facedup/hashing/crop_resistant.hpp"
#include "facedup/hashing/digest.hpp"
#include "facedup/hashing/phash.hpp"

namespace {

using facedup::cli::RunConfig;

enum Exit { kOk = 0, kConfig = 2, kData = 3, kInternal = 4 };

struct Overrides {
  std::string config_file;
  std::string out;
  unsigned workers = 0;
  std::vector<std::string> datasets;  // id=dir
  std::vector<std::string> excludes;  // id=file
  std::vector<std::string> sidecars;
  int phash_distance = -1;
  bool no_phash = false;
  bool no_crop = false;
  bool preprocessed = false;
  std::string aligned_dir;
  std::string segment_hash;
  std::optional<double> t_fp, t_assign, t_margin;
  std::string fp_rule;
  std::string mode;
  std::optional<std::uint64_t> seed;
};

std::pair<std::string, std::string> split_assignment(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw facedup::ConfigError("expected <dataset_id>=<path>, got '" + s + "'");
  }
  return {s.substr(0, eq), s.substr(eq + 1)};
}

RunConfig make_config(const Overrides& o) {
  RunConfig c = o.config_file.empty() ? RunConfig{} : RunConfig::load(o.config_file);
  if (!o.out.empty()) c.output_dir = o.out;
  if (o.workers) c.workers = o.workers;
  for (const auto& d : o.datasets) {
    auto [id, dir] = split_assignment(d);
    c.datasets.push_back({id, dir, std::nullopt});
  }
  for (const auto& e : o.excludes) {
    auto [id, file] = split_assignment(e);
    bool found = false;
    for (auto& d : c.datasets) {
      if (d.id == id) {
        d.exclude_list = file;
        found = true;
      }
    }
    if (!found) throw facedup::ConfigError("exclude list for unknown dataset " + id);
  }
  for (const auto& s : o.sidecars) c.sidecars.emplace_back(s);
  if (o.phash_distance >= 0) c.scan.phash_max_distance = o.phash_distance;
  if (o.no_phash) c.scan.phash = false;
  if (o.no_crop) c.scan.crop_resistant = false;
  if (o.preprocessed) c.preprocessed = true;
  if (!o.aligned_dir.empty()) c.aligned_dir = o.aligned_dir;
  if (!o.segment_hash.empty()) {
    c.scan.crop.segment_hash = facedup::hashing::segment_hash_from_string(o.segment_hash);
  }
  if (o.t_fp) c.dedup.thresholds.fp = *o.t_fp;
  if (o.t_assign) c.dedup.thresholds.assign = *o.t_assign;
  if (o.t_margin) c.dedup.thresholds.margin = *o.t_margin;
  if (!o.fp_rule.empty()) c.dedup.fp_rule = facedup::dedup::fp_rule_from_string(o.fp_rule);
  if (!o.mode.empty()) c.dedup.mode = facedup::dedup::dedup_mode_from_string(o.mode);
  if (o.seed) c.eval.seed = *o.seed;
  c.finalize();
  return c;
}

void print_hashes(const std::vector<std::string>& files) {
  for (const auto& f : files) {
    const auto bytes = facedup::corpus::read_file(f);
    const auto img = facedup::corpus::decode_canonical(bytes, f);
    const auto cr = facedup::hashing::crop_resistant_hash(img);
    std::cout << f << '\t' << facedup::hashing::content_digest(bytes).hex() << '\t'
              << facedup::hashing::phash(img).hex() << '\t'
              << facedup::hashing::dhash(img).hex() << '\t'
              << (cr.empty() ? "-" : cr.hex_list()) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("facedup");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("%^%l%$: %v");

  CLI::App app{"Duplicate detection and preservative deduplication for face-image datasets"};
  app.fallthrough();
  app.require_subcommand(1);
  Overrides o;
  bool quiet = false;
  app.add_option("-c,--config", o.config_file, "JSON run configuration");
  app.add_option("-o,--out", o.out, "Output directory");
  app.add_option("-j,--workers", o.workers, "Worker threads");
  app.add_option("--dataset", o.datasets, "Dataset root as <id>=<dir> (repeatable)");
  app.add_option("--exclude", o.excludes, "Exclusion list as <id>=<file> (repeatable)");
  app.add_option("--sidecar", o.sidecars, "Feature sidecar file (repeatable)");
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");

  auto* scan = app.add_subcommand("scan", "Find exact and near duplicate sets");
  scan->add_option("--phash-distance", o.phash_distance, "Maximum pHash Hamming distance")
      ->check(CLI::Range(0, 64));
  scan->add_flag("--no-phash", o.no_phash, "Disable pHash grouping");
  scan->add_flag("--no-crop-resistant", o.no_crop, "Disable crop-resistant hashing");
  scan->add_flag("--preprocessed", o.preprocessed, "Also scan aligned face crops");
  scan->add_option("--aligned-dir", o.aligned_dir, "Write aligned crops here as PNG");
  scan->add_option("--segment-hash", o.segment_hash, "Per-segment hash: dhash or phash");

  auto* dedup = app.add_subcommand("dedup", "Build the deduplication plan");
  dedup->add_option("--t-fp", o.t_fp, "False-positive similarity threshold");
  dedup->add_option("--t-assign", o.t_assign, "Minimum mean similarity for assignment");
  dedup->add_option("--t-margin", o.t_margin, "Minimum lead over the second subject");
  dedup->add_option("--fp-rule", o.fp_rule, "any_pair or components");
  dedup->add_option("--mode", o.mode, "preservative or full-removal");

  auto* apply = app.add_subcommand("apply", "Apply removed/moved lists");
  std::string materialize;
  apply->add_option("--materialize", materialize, "Copy the deduplicated tree here");

  auto* eval = app.add_subcommand("eval", "Verification and EDC metrics");
  std::vector<std::string> variants;
  eval->add_option("--variant", variants, "original, full or preservative (repeatable)")
      ->check(CLI::IsMember({"original", "full", "preservative"}));
  eval->add_option("--seed", o.seed, "Non-mated sampling seed");

  auto* report = app.add_subcommand("report", "Merge stage reports into report.json");

  auto* hash = app.add_subcommand("hash", "Print digest, pHash, dHash and segment hashes");
  std::vector<std::string> files;
  hash->add_option("files", files, "Image files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  spdlog::set_level(quiet ? spdlog::level::warn : spdlog::level::info);

  try {
    if (hash->parsed()) {
      print_hashes(files);
      return kOk;
    }
    const RunConfig config = make_config(o);
    if (scan->parsed()) {
      facedup::cli::cmd_scan(config);
    } else if (dedup->parsed()) {
      facedup::cli::cmd_dedup(config);
    } else if (apply->parsed()) {
      facedup::cli::cmd_apply(config, materialize.empty()
                                          ? std::nullopt
                                          : std::optional<std::filesystem::path>(materialize));
    } else if (eval->parsed()) {
      if (variants.empty()) variants = {"original", "full", "preservative"};
      facedup::cli::cmd_eval(config, variants);
    } else if (report->parsed()) {
      std::cout << facedup::cli::cmd_report(config).dump(2) << '\n';
    }
    return kOk;
  } catch (const facedup::ConfigError& e) {
    spdlog::error("{}", e.what());
    return kConfig;
  } catch (const facedup::Error& e) {
    spdlog::error("{}", e.what());
    return kData;
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    return kInternal;
  }
}
