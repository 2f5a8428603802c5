#pragma once

#include <filesystem>
#include <optional>

#include "facedup/corpus/source.hpp"
#include "facedup/features/features.hpp"
#include "facedup/hashing/duplicates.hpp"

namespace facedup::align {

/// Aligned 112x112 crops as scan content. The identity bytes are the raw RGB
/// crop samples, so two images are exact duplicates in this variant when
/// their crops are pixel-identical. Images without a usable primary face are
/// reported as skipped with reason no_face or degenerate_landmarks.
class AlignedContent final : public hashing::ContentProvider {
 public:
  AlignedContent(const corpus::ByteSource& source, const features::FeatureStore& store,
                 std::optional<std::filesystem::path> materialize_dir = std::nullopt)
      : source_(source), store_(store), materialize_dir_(std::move(materialize_dir)) {}

  std::vector<std::byte> identity_bytes(const corpus::ImageRecord& rec) const override;
  corpus::PixelBuffer pixels(const corpus::ImageRecord& rec,
                             std::span<const std::byte> identity) const override;

 private:
  const corpus::ByteSource& source_;
  const features::FeatureStore& store_;
  std::optional<std::filesystem::path> materialize_dir_;
};

}  // namespace facedup::align
