#include "facedup/corpus/source.hpp"

#include <fstream>

#include "facedup/error.hpp"

namespace facedup::corpus {

std::vector<std::byte> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open " + path.string());
  const auto size = static_cast<std::size_t>(in.tellg());
  std::vector<std::byte> bytes(size);
  in.seekg(0);
  if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()),
                           static_cast<std::streamsize>(size))) {
    throw IoError("cannot read " + path.string());
  }
  return bytes;
}

void write_file(const std::filesystem::path& path, const std::vector<std::byte>& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

FileSource::FileSource(const std::vector<DatasetRoot>& roots) {
  for (const auto& r : roots) roots_[r.dataset_id] = r.directory;
}

std::filesystem::path FileSource::path_of(const ImageRecord& record) const {
  auto it = roots_.find(record.dataset_id);
  if (it == roots_.end()) throw IoError("no root configured for dataset " + record.dataset_id);
  return it->second / record.rel_path;
}

std::vector<std::byte> FileSource::read(const ImageRecord& record) const {
  return read_file(path_of(record));
}

std::vector<std::byte> MemorySource::read(const ImageRecord& record) const {
  auto it = files_.find(record.image_id);
  if (it == files_.end()) throw IoError("no bytes for " + record.image_id);
  return it->second;
}

}  // namespace facedup::corpus
