#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "facedup/align/align.hpp"

namespace facedup::features {

/// Unit-length feature vector.
using Embedding = std::vector<double>;

/// A missing quality compares below every real value.
using QualityScore = std::optional<double>;

inline bool quality_less(const QualityScore& a, const QualityScore& b) {
  if (!a) return b.has_value();
  return b && *a < *b;
}

struct FeatureRecord {
  std::optional<Embedding> embedding;
  QualityScore quality;
  /// nullopt when the provider recorded no detection result ("-").
  std::optional<std::vector<align::Detection>> detections;

  bool operator==(const FeatureRecord&) const = default;
};

class FeatureStore {
 public:
  explicit FeatureStore(std::size_t dim = 0) : dim_(dim) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return records_.size(); }

  /// Empty record when the id is unknown.
  const FeatureRecord& get(std::string_view image_id) const;
  bool contains(std::string_view image_id) const;
  const Embedding* embedding(std::string_view image_id) const;
  QualityScore quality(std::string_view image_id) const;

  /// Inserts or replaces. Embeddings must have dim() entries.
  void put(const std::string& image_id, FeatureRecord record);

  const std::map<std::string, FeatureRecord, std::less<>>& records() const noexcept {
    return records_;
  }

 private:
  std::size_t dim_;
  std::map<std::string, FeatureRecord, std::less<>> records_;
};

/// Parses one sidecar. Vectors off unit length by more than 1e-6 are
/// normalized and reported through `warnings`. Throws DataError with the
/// line number on malformed input.
FeatureStore read_sidecar(std::istream& in, std::vector<std::string>* warnings = nullptr,
                          std::string_view source_name = "sidecar");

/// Merges several sidecars; later files win on duplicate ids (with a warning).
/// All files must declare the same dimension.
FeatureStore load_sidecars(std::span<const std::filesystem::path> paths,
                           std::vector<std::string>* warnings = nullptr);

/// Records in image_id order; values use shortest round-trip formatting.
void write_sidecar(std::ostream& out, const FeatureStore& store);

std::string detections_to_json(const std::vector<align::Detection>& detections);
std::vector<align::Detection> detections_from_json(std::string_view json);

/// Inner product summed in index order. Throws on dimension mismatch.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Mean cosine similarity against the gallery, accumulated in gallery order.
/// nullopt for an empty gallery.
std::optional<double> mean_similarity(std::span<const double> probe,
                                      std::span<const Embedding* const> gallery);

}  // namespace facedup::features
