#include "facedup/align/aligned_content.hpp"

#include <cstring>

namespace facedup::align {

std::vector<std::byte> AlignedContent::identity_bytes(const corpus::ImageRecord& rec) const {
  const auto& features = store_.get(rec.image_id);
  if (!features.detections || features.detections->empty()) {
    throw hashing::ImageSkipped(std::string(to_string(AlignFailure::kNoFace)),
                                rec.image_id + ": no face detection");
  }
  const auto bytes = source_.read(rec);
  const auto img = corpus::decode_canonical(bytes, rec.image_id);
  auto result = align_face(img, *features.detections);
  if (!result.crop) {
    throw hashing::ImageSkipped(std::string(to_string(result.failure)),
                                rec.image_id + ": alignment failed");
  }
  if (materialize_dir_) {
    // Suffix rather than replace the extension so a.jpg and a.png stay apart.
    const auto path = *materialize_dir_ / rec.dataset_id / (rec.rel_path + ".png");
    corpus::write_file(path, corpus::encode_png(*result.crop));
  }
  std::vector<std::byte> out(result.crop->data.size());
  std::memcpy(out.data(), result.crop->data.data(), out.size());
  return out;
}

corpus::PixelBuffer AlignedContent::pixels(const corpus::ImageRecord& rec,
                                           std::span<const std::byte> identity) const {
  corpus::PixelBuffer buf(kCropSize, kCropSize, 3);
  if (identity.size() != buf.data.size()) {
    throw DecodeError(rec.image_id, "aligned crop has unexpected size");
  }
  std::memcpy(buf.data.data(), identity.data(), identity.size());
  return buf;
}

}  // namespace facedup::align
