#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace facedup::corpus {

/// One dataset image. image_id is "<dataset_id>/<rel_path>".
struct ImageRecord {
  std::string image_id;
  std::string dataset_id;
  std::string subject_id;
  std::string rel_path;  // dataset-relative, '/'-separated
  std::uint64_t byte_len = 0;

  bool operator==(const ImageRecord&) const = default;
};

std::string make_image_id(std::string_view dataset_id, std::string_view rel_path);

/// (dataset_id, subject_id) pair; subjects are scoped per dataset.
using SubjectKey = std::pair<std::string, std::string>;

/// Ordered collection of ImageRecords, sorted by (dataset_id, rel_path).
class Manifest {
 public:
  Manifest() = default;
  /// Sorts the records and validates uniqueness; throws DataError otherwise.
  explicit Manifest(std::vector<ImageRecord> records);

  const std::vector<ImageRecord>& records() const noexcept { return records_; }
  const std::vector<std::string>& datasets() const noexcept { return datasets_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  /// Index of the record with this id, if present.
  std::optional<std::size_t> find(std::string_view image_id) const;
  const ImageRecord& at(std::string_view image_id) const;

  std::size_t subject_count() const;
  /// Record indices per subject, each list in manifest order (ascending path).
  std::map<SubjectKey, std::vector<std::size_t>> subjects() const;

 private:
  std::vector<ImageRecord> records_;
  std::vector<std::string> datasets_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

struct DatasetRoot {
  std::string dataset_id;
  std::filesystem::path directory;
};

struct ManifestOptions {
  /// Lower-case extensions including the dot.
  std::set<std::string> extensions{".jpg", ".jpeg", ".png", ".bmp"};
  /// Dataset-relative paths to leave out, keyed by dataset id.
  std::map<std::string, std::set<std::string>> excluded;
};

struct SkippedFile {
  std::string dataset_id;
  std::string rel_path;
  std::string reason;

  bool operator==(const SkippedFile&) const = default;
  auto operator<=>(const SkippedFile&) const = default;
};

struct ManifestBuild {
  Manifest manifest;
  std::vector<SkippedFile> skipped;  // sorted
};

/// Walks every root; the subject label of a file is its immediate parent
/// directory name. Files directly inside a root have no subject and are
/// skipped, as are unrecognized extensions and unreadable files. Throws
/// IoError when a root itself cannot be read.
ManifestBuild build_manifest(const std::vector<DatasetRoot>& roots,
                             const ManifestOptions& options = {});

/// Line format: dataset_id \t subject_id \t rel_path \t byte_len
void write_manifest(std::ostream& out, const Manifest& manifest);
Manifest read_manifest(std::istream& in);

/// Reads a line-delimited list of dataset-relative paths (blank lines and
/// '#' comments ignored).
std::set<std::string> read_path_list(const std::filesystem::path& file);

}  // namespace facedup::corpus
