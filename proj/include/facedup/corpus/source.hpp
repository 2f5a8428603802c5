#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "facedup/corpus/manifest.hpp"

namespace facedup::corpus {

/// Access to the encoded bytes of manifest images.
class ByteSource {
 public:
  virtual ~ByteSource() = default;
  /// Throws IoError on failure.
  virtual std::vector<std::byte> read(const ImageRecord& record) const = 0;
};

/// Reads <root of dataset_id>/<rel_path> from disk.
class FileSource final : public ByteSource {
 public:
  explicit FileSource(const std::vector<DatasetRoot>& roots);
  std::vector<std::byte> read(const ImageRecord& record) const override;
  std::filesystem::path path_of(const ImageRecord& record) const;

 private:
  std::map<std::string, std::filesystem::path> roots_;
};

/// In-memory source keyed by image_id (tests and synthetic corpora).
class MemorySource final : public ByteSource {
 public:
  void put(const std::string& image_id, std::vector<std::byte> bytes) {
    files_[image_id] = std::move(bytes);
  }
  std::vector<std::byte> read(const ImageRecord& record) const override;

 private:
  std::map<std::string, std::vector<std::byte>> files_;
};

std::vector<std::byte> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<std::byte>& bytes);

}  // namespace facedup::corpus
