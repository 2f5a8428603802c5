#include "facedup/cli/config.hpp"

#include <fstream>
#include <set>

#include "facedup/error.hpp"

namespace facedup::cli {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  check_keys(j,
             {"datasets", "output_dir", "workers", "hashing", "preprocessed", "aligned_dir",
              "sidecars", "dedup", "eval"},
             "config");
  if (const auto it = j.find("datasets"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("config.datasets must be an array");
    for (const auto& d : *it) {
      check_keys(d, {"id", "root", "exclude"}, "dataset");
      DatasetConfig dc;
      std::string root, exclude;
      read(d, "id", dc.id, "dataset");
      read(d, "root", root, "dataset");
      read(d, "exclude", exclude, "dataset");
      dc.root = root;
      if (!exclude.empty()) dc.exclude_list = exclude;
      c.datasets.push_back(std::move(dc));
    }
  }
  std::string out_dir = c.output_dir.string();
  read(j, "output_dir", out_dir, "config");
  c.output_dir = out_dir;
  read(j, "workers", c.workers, "config");
  read(j, "preprocessed", c.preprocessed, "config");
  if (j.contains("aligned_dir")) {
    std::string a;
    read(j, "aligned_dir", a, "config");
    c.aligned_dir = a;
  }
  if (j.contains("sidecars")) {
    std::vector<std::string> s;
    read(j, "sidecars", s, "config");
    c.sidecars.assign(s.begin(), s.end());
  }
  if (const auto it = j.find("hashing"); it != j.end()) {
    const std::string w = "hashing";
    check_keys(*it,
               {"phash", "phash_max_distance", "crop_resistant", "segment_hash",
                "segmentation_size", "segment_threshold", "min_segment_size", "blur_radius",
                "region_cutoff", "bit_error_rate"},
               w);
    read(*it, "phash", c.scan.phash, w);
    read(*it, "phash_max_distance", c.scan.phash_max_distance, w);
    read(*it, "crop_resistant", c.scan.crop_resistant, w);
    std::string seg = std::string(hashing::to_string(c.scan.crop.segment_hash));
    read(*it, "segment_hash", seg, w);
    c.scan.crop.segment_hash = hashing::segment_hash_from_string(seg);
    read(*it, "segmentation_size", c.scan.crop.segmentation_size, w);
    read(*it, "segment_threshold", c.scan.crop.segment_threshold, w);
    read(*it, "min_segment_size", c.scan.crop.min_segment_size, w);
    read(*it, "blur_radius", c.scan.crop.blur_radius, w);
    read(*it, "region_cutoff", c.scan.match.region_cutoff, w);
    read(*it, "bit_error_rate", c.scan.match.bit_error_rate, w);
  }
  if (const auto it = j.find("dedup"); it != j.end()) {
    const std::string w = "dedup";
    check_keys(*it, {"t_fp", "t_assign", "t_margin", "fp_rule", "mode"}, w);
    read(*it, "t_fp", c.dedup.thresholds.fp, w);
    read(*it, "t_assign", c.dedup.thresholds.assign, w);
    read(*it, "t_margin", c.dedup.thresholds.margin, w);
    std::string rule = std::string(dedup::to_string(c.dedup.fp_rule));
    std::string mode = std::string(dedup::to_string(c.dedup.mode));
    read(*it, "fp_rule", rule, w);
    read(*it, "mode", mode, w);
    c.dedup.fp_rule = dedup::fp_rule_from_string(rule);
    c.dedup.mode = dedup::dedup_mode_from_string(mode);
  }
  if (const auto it = j.find("eval"); it != j.end()) {
    const std::string w = "eval";
    check_keys(*it, {"seed", "edc_fmr", "pauc_hi"}, w);
    read(*it, "seed", c.eval.seed, w);
    read(*it, "edc_fmr", c.eval.edc_fmr, w);
    read(*it, "pauc_hi", c.eval.pauc_hi, w);
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + file.string() + ": " + e.what());
  }
  return from_json(j);
}

json RunConfig::to_json() const {
  json ds = json::array();
  for (const auto& d : datasets) {
    json e{{"id", d.id}, {"root", d.root.string()}};
    if (d.exclude_list) e["exclude"] = d.exclude_list->string();
    ds.push_back(e);
  }
  json j{
      {"datasets", ds},
      {"preprocessed", preprocessed},
      {"sidecars", json::array()},
      {"hashing",
       {{"phash", scan.phash},
        {"phash_max_distance", scan.phash_max_distance},
        {"crop_resistant", scan.crop_resistant},
        {"segment_hash", hashing::to_string(scan.crop.segment_hash)},
        {"segmentation_size", scan.crop.segmentation_size},
        {"segment_threshold", scan.crop.segment_threshold},
        {"min_segment_size", scan.crop.min_segment_size},
        {"blur_radius", scan.crop.blur_radius},
        {"region_cutoff", scan.match.region_cutoff},
        {"bit_error_rate", scan.match.bit_error_rate}}},
      {"dedup",
       {{"t_fp", dedup.thresholds.fp},
        {"t_assign", dedup.thresholds.assign},
        {"t_margin", dedup.thresholds.margin},
        {"fp_rule", dedup::to_string(dedup.fp_rule)},
        {"mode", dedup::to_string(dedup.mode)}}},
      {"eval", {{"seed", eval.seed}, {"edc_fmr", eval.edc_fmr}, {"pauc_hi", eval.pauc_hi}}},
  };
  for (const auto& s : sidecars) j["sidecars"].push_back(s.string());
  return j;
}

void RunConfig::finalize() {
  if (workers == 0) throw ConfigError("workers must be at least 1");
  std::set<std::string> ids;
  for (const auto& d : datasets) {
    if (d.id.empty() || d.id.find_first_of("/\t\n") != std::string::npos) {
      throw ConfigError("invalid dataset id '" + d.id + "'");
    }
    if (!ids.insert(d.id).second) throw ConfigError("dataset id repeated: " + d.id);
  }
  scan.workers = workers;
  dedup.workers = workers;
  eval.workers = workers;
  scan.validate();
  dedup.validate();
  if (!(eval.edc_fmr > 0 && eval.edc_fmr <= 1)) throw ConfigError("eval.edc_fmr must be in (0, 1]");
  if (!(eval.pauc_hi > 0 && eval.pauc_hi <= 1)) throw ConfigError("eval.pauc_hi must be in (0, 1]");
}

std::vector<corpus::DatasetRoot> RunConfig::roots() const {
  std::vector<corpus::DatasetRoot> out;
  for (const auto& d : datasets) out.push_back({d.id, d.root});
  return out;
}

}  // namespace facedup::cli
