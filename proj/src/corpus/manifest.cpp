#include "facedup/corpus/manifest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <system_error>

#include "facedup/error.hpp"
#include "facedup/text.hpp"

namespace facedup::corpus {
namespace fs = std::filesystem;

std::string make_image_id(std::string_view dataset_id, std::string_view rel_path) {
  std::string id;
  id.reserve(dataset_id.size() + rel_path.size() + 1);
  id.append(dataset_id).append("/").append(rel_path);
  return id;
}

Manifest::Manifest(std::vector<ImageRecord> records) : records_(std::move(records)) {
  std::sort(records_.begin(), records_.end(), [](const auto& a, const auto& b) {
    return std::tie(a.dataset_id, a.rel_path) < std::tie(b.dataset_id, b.rel_path);
  });
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (r.subject_id.empty()) {
      throw DataError("manifest record without subject: " + r.image_id);
    }
    if (i > 0 && records_[i - 1].dataset_id == r.dataset_id &&
        records_[i - 1].rel_path == r.rel_path) {
      throw DataError("duplicate manifest path: " + r.dataset_id + "/" + r.rel_path);
    }
    if (!index_.emplace(r.image_id, i).second) {
      throw DataError("duplicate image id: " + r.image_id);
    }
    if (datasets_.empty() || datasets_.back() != r.dataset_id) {
      datasets_.push_back(r.dataset_id);
    }
  }
}

std::optional<std::size_t> Manifest::find(std::string_view image_id) const {
  if (auto it = index_.find(image_id); it != index_.end()) return it->second;
  return std::nullopt;
}

const ImageRecord& Manifest::at(std::string_view image_id) const {
  auto idx = find(image_id);
  if (!idx) throw DataError("image not in manifest: " + std::string(image_id));
  return records_[*idx];
}

std::size_t Manifest::subject_count() const { return subjects().size(); }

std::map<SubjectKey, std::vector<std::size_t>> Manifest::subjects() const {
  std::map<SubjectKey, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    out[{records_[i].dataset_id, records_[i].subject_id}].push_back(i);
  }
  return out;
}

namespace {

std::string lower_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

ManifestBuild build_manifest(const std::vector<DatasetRoot>& roots,
                             const ManifestOptions& options) {
  std::vector<ImageRecord> records;
  std::vector<SkippedFile> skipped;
  for (const auto& root : roots) {
    std::error_code ec;
    if (!fs::is_directory(root.directory, ec)) {
      throw IoError("dataset root is not a readable directory: " +
                    root.directory.string());
    }
    fs::recursive_directory_iterator it(
        root.directory, fs::directory_options::skip_permission_denied, ec);
    if (ec) {
      throw IoError("cannot read dataset root " + root.directory.string() + ": " +
                    ec.message());
    }
    const auto excluded = options.excluded.find(root.dataset_id);
    for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
      if (ec) {
        throw IoError("directory walk failed under " + root.directory.string() +
                      ": " + ec.message());
      }
      const auto& entry = *it;
      std::error_code fec;
      if (!entry.is_regular_file(fec)) continue;
      const fs::path rel = entry.path().lexically_relative(root.directory);
      const std::string rel_path = rel.generic_string();
      if (excluded != options.excluded.end() && excluded->second.contains(rel_path)) {
        skipped.push_back({root.dataset_id, rel_path, "excluded"});
        continue;
      }
      if (!options.extensions.contains(lower_extension(rel))) {
        skipped.push_back({root.dataset_id, rel_path, "unrecognized_extension"});
        continue;
      }
      if (!rel.has_parent_path()) {
        skipped.push_back({root.dataset_id, rel_path, "no_subject_directory"});
        continue;
      }
      if (rel_path.find_first_of("\t\n\r") != std::string::npos) {
        skipped.push_back({root.dataset_id, rel_path, "unsupported_path_characters"});
        continue;
      }
      const auto size = entry.file_size(fec);
      std::ifstream probe(entry.path(), std::ios::binary);
      if (fec || !probe) {
        skipped.push_back({root.dataset_id, rel_path, "unreadable"});
        continue;
      }
      ImageRecord rec;
      rec.dataset_id = root.dataset_id;
      rec.rel_path = rel_path;
      rec.subject_id = rel.parent_path().filename().string();
      rec.byte_len = size;
      rec.image_id = make_image_id(rec.dataset_id, rec.rel_path);
      records.push_back(std::move(rec));
    }
  }
  std::sort(skipped.begin(), skipped.end());
  return {Manifest(std::move(records)), std::move(skipped)};
}

void write_manifest(std::ostream& out, const Manifest& manifest) {
  for (const auto& r : manifest.records()) {
    out << r.dataset_id << '\t' << r.subject_id << '\t' << r.rel_path << '\t'
        << r.byte_len << '\n';
  }
}

Manifest read_manifest(std::istream& in) {
  std::vector<ImageRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = text::split(line, '\t');
    if (fields.size() != 4) {
      throw DataError("manifest line " + std::to_string(line_no) +
                      ": expected 4 tab-separated fields");
    }
    ImageRecord r;
    r.dataset_id = fields[0];
    r.subject_id = fields[1];
    r.rel_path = fields[2];
    if (!text::parse_uint(fields[3], r.byte_len)) {
      throw DataError("manifest line " + std::to_string(line_no) + ": bad byte length");
    }
    if (r.dataset_id.empty() || r.rel_path.empty()) {
      throw DataError("manifest line " + std::to_string(line_no) + ": empty field");
    }
    r.image_id = make_image_id(r.dataset_id, r.rel_path);
    records.push_back(std::move(r));
  }
  return Manifest(std::move(records));
}

std::set<std::string> read_path_list(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open list file: " + file.string());
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    line = std::string(text::trim(line));
    if (line.empty() || line.front() == '#') continue;
    out.insert(line);
  }
  return out;
}

}  // namespace facedup::corpus
