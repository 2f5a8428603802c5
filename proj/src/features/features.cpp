#include "facedup/features/features.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "facedup/error.hpp"
#include "facedup/text.hpp"

namespace facedup::features {

namespace {

const FeatureRecord kEmpty{};

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& what) {
  throw DataError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

const FeatureRecord& FeatureStore::get(std::string_view image_id) const {
  const auto it = records_.find(image_id);
  return it == records_.end() ? kEmpty : it->second;
}

bool FeatureStore::contains(std::string_view image_id) const {
  return records_.find(image_id) != records_.end();
}

const Embedding* FeatureStore::embedding(std::string_view image_id) const {
  const auto& r = get(image_id);
  return r.embedding ? &*r.embedding : nullptr;
}

QualityScore FeatureStore::quality(std::string_view image_id) const {
  return get(image_id).quality;
}

void FeatureStore::put(const std::string& image_id, FeatureRecord record) {
  if (record.embedding && record.embedding->size() != dim_) {
    throw DataError(image_id + ": embedding has " + std::to_string(record.embedding->size()) +
                    " entries, expected " + std::to_string(dim_));
  }
  records_[image_id] = std::move(record);
}

std::string detections_to_json(const std::vector<align::Detection>& detections) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& d : detections) {
    nlohmann::json lm = nlohmann::json::array();
    for (const auto& p : d.landmarks) lm.push_back({p.x, p.y});
    arr.push_back({{"bbox", {d.x, d.y, d.w, d.h}}, {"confidence", d.confidence}, {"landmarks", lm}});
  }
  return arr.dump();
}

std::vector<align::Detection> detections_from_json(std::string_view json) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad detections json: ") + e.what());
  }
  if (!arr.is_array()) throw DataError("detections must be a JSON array");
  std::vector<align::Detection> out;
  try {
    for (const auto& j : arr) {
      align::Detection d;
      const auto& bbox = j.at("bbox");
      if (bbox.size() != 4) throw DataError("bbox needs 4 numbers");
      d.x = bbox[0].get<double>();
      d.y = bbox[1].get<double>();
      d.w = bbox[2].get<double>();
      d.h = bbox[3].get<double>();
      d.confidence = j.at("confidence").get<double>();
      const auto& lm = j.at("landmarks");
      if (lm.size() != 5) throw DataError("need exactly 5 landmarks");
      for (std::size_t k = 0; k < 5; ++k) {
        if (lm[k].size() != 2) throw DataError("landmark needs 2 coordinates");
        d.landmarks[k] = {lm[k][0].get<double>(), lm[k][1].get<double>()};
      }
      if (!d.valid()) throw DataError("detection with non-positive size or non-finite value");
      out.push_back(d);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad detection: ") + e.what());
  }
  return out;
}

FeatureStore read_sidecar(std::istream& in, std::vector<std::string>* warnings,
                          std::string_view source_name) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<FeatureStore> store;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!store) {
      constexpr std::string_view kHeader = "#dim=";
      std::size_t dim = 0;
      if (line.rfind(kHeader, 0) != 0 ||
          !text::parse_uint(std::string_view(line).substr(kHeader.size()), dim)) {
        fail(source_name, lineno, "expected header #dim=<D>");
      }
      store.emplace(dim);
      continue;
    }
    const auto fields = text::split(line, '\t');
    if (fields.size() != 4) fail(source_name, lineno, "expected 4 tab-separated fields");
    const std::string& id = fields[0];
    if (id.empty()) fail(source_name, lineno, "empty image_id");

    FeatureRecord rec;
    double q = 0;
    if (!text::parse_double(fields[1], q) || std::isinf(q)) {
      fail(source_name, lineno, "bad quality '" + fields[1] + "'");
    }
    if (!std::isnan(q)) rec.quality = q;

    if (fields[2] != "-") {
      Embedding v;
      for (const auto& tok : text::split(fields[2], ',')) {
        double x = 0;
        if (!text::parse_double(tok, x) || !std::isfinite(x)) {
          fail(source_name, lineno, "bad embedding value '" + tok + "'");
        }
        v.push_back(x);
      }
      if (v.size() != store->dim()) {
        fail(source_name, lineno,
             "dimension mismatch: " + std::to_string(v.size()) + " != " +
                 std::to_string(store->dim()));
      }
      double norm2 = 0;
      for (double x : v) norm2 += x * x;
      const double norm = std::sqrt(norm2);
      if (norm == 0) fail(source_name, lineno, "zero embedding");
      if (std::abs(norm - 1.0) > 1e-6) {
        for (double& x : v) x /= norm;
        if (warnings) {
          warnings->push_back(std::string(source_name) + ":" + std::to_string(lineno) + ": " +
                              id + " embedding norm " + text::format_double(norm) +
                              " normalized");
        }
      }
      rec.embedding = std::move(v);
    }

    if (fields[3] != "-") {
      try {
        rec.detections = detections_from_json(fields[3]);
      } catch (const DataError& e) {
        fail(source_name, lineno, e.what());
      }
    }
    if (store->contains(id) && warnings) {
      warnings->push_back(std::string(source_name) + ":" + std::to_string(lineno) +
                          ": duplicate record for " + id + ", last one kept");
    }
    store->put(id, std::move(rec));
  }
  if (!store) fail(source_name, lineno, "missing #dim header");
  return std::move(*store);
}

FeatureStore load_sidecars(std::span<const std::filesystem::path> paths,
                           std::vector<std::string>* warnings) {
  std::optional<FeatureStore> merged;
  for (const auto& p : paths) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open sidecar " + p.string());
    auto part = read_sidecar(in, warnings, p.string());
    if (!merged) {
      merged = std::move(part);
      continue;
    }
    if (part.dim() != merged->dim()) {
      throw DataError(p.string() + ": dimension " + std::to_string(part.dim()) +
                      " differs from " + std::to_string(merged->dim()));
    }
    for (const auto& [id, rec] : part.records()) {
      if (merged->contains(id) && warnings) {
        warnings->push_back(p.string() + ": duplicate record for " + id + ", last one kept");
      }
      merged->put(id, rec);
    }
  }
  return merged ? std::move(*merged) : FeatureStore{};
}

void write_sidecar(std::ostream& out, const FeatureStore& store) {
  out << "#dim=" << store.dim() << '\n';
  for (const auto& [id, rec] : store.records()) {
    out << id << '\t' << (rec.quality ? text::format_double(*rec.quality) : "nan") << '\t';
    if (rec.embedding) {
      for (std::size_t i = 0; i < rec.embedding->size(); ++i) {
        if (i) out << ',';
        out << text::format_double((*rec.embedding)[i]);
      }
    } else {
      out << '-';
    }
    out << '\t' << (rec.detections ? detections_to_json(*rec.detections) : "-") << '\n';
  }
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("cosine_similarity: dimension mismatch");
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::optional<double> mean_similarity(std::span<const double> probe,
                                      std::span<const Embedding* const> gallery) {
  if (gallery.empty()) return std::nullopt;
  double s = 0;
  for (const Embedding* g : gallery) s += cosine_similarity(probe, *g);
  return s / static_cast<double>(gallery.size());
}

}  // namespace facedup::features
