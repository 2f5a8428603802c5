#include "facedup/hashing/duplicates.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "facedup/hashing/bk_tree.hpp"
#include "facedup/parallel.hpp"
#include "facedup/text.hpp"
#include "facedup/union_find.hpp"

namespace facedup::hashing {

std::string_view to_string(DupSource s) {
  switch (s) {
    case DupSource::kExact: return "exact";
    case DupSource::kPHash: return "phash";
    case DupSource::kCropResistant: return "crop_resistant";
  }
  return "?";
}

std::string_view to_string(ImageVariant v) {
  return v == ImageVariant::kOriginal ? "original" : "preprocessed";
}

DupSource dup_source_from_string(std::string_view s) {
  if (s == "exact") return DupSource::kExact;
  if (s == "phash") return DupSource::kPHash;
  if (s == "crop_resistant") return DupSource::kCropResistant;
  throw DataError("unknown duplicate source: " + std::string(s));
}

ImageVariant variant_from_string(std::string_view s) {
  if (s == "original") return ImageVariant::kOriginal;
  if (s == "preprocessed") return ImageVariant::kPreprocessed;
  throw DataError("unknown image variant: " + std::string(s));
}

std::vector<std::byte> OriginalContent::identity_bytes(const corpus::ImageRecord& rec) const {
  return source_.read(rec);
}

corpus::PixelBuffer OriginalContent::pixels(const corpus::ImageRecord& rec,
                                            std::span<const std::byte> identity) const {
  return corpus::decode_canonical(identity, rec.image_id);
}

void ScanConfig::validate() const {
  if (phash_max_distance < 0 || phash_max_distance > 64) {
    throw ConfigError("phash max distance must be in [0, 64]");
  }
  if (match.region_cutoff < 1) throw ConfigError("region cutoff must be >= 1");
  if (!(match.bit_error_rate > 0 && match.bit_error_rate <= 1)) {
    throw ConfigError("bit error rate must be in (0, 1]");
  }
  if (crop.segmentation_size < 1 || crop.min_segment_size < 0 || crop.segment_threshold < 0 ||
      crop.segment_threshold > 255) {
    throw ConfigError("invalid crop-resistant parameters");
  }
  if (workers == 0) throw ConfigError("workers must be at least 1");
}

std::string hash_algorithm_version(const ScanConfig& c) {
  std::string v = "v1 digest=" + std::string(kDigestAlgorithm) + " phash=dct32";
  if (c.crop_resistant) {
    v += " crop=" + std::string(to_string(c.crop.segment_hash)) + "/" +
         std::to_string(c.crop.segmentation_size) + "/" + std::to_string(c.crop.segment_threshold) +
         "/" + std::to_string(c.crop.min_segment_size) + "/" +
         text::format_double(c.crop.blur_radius);
  } else {
    v += " crop=off";
  }
  return v;
}

namespace {
constexpr std::string_view kCacheMagic = "#facedup-hash-cache\t";
}

bool HashCache::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return false;
  if (line != std::string(kCacheMagic) + version_) return false;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = text::split(line, '\t');
    ImageHashes h;
    if (f.size() != 5 || !ContentDigest::from_hex(f[2], h.digest) ||
        !text::from_hex64(f[3], h.phash.bits) || !MultiHash::from_hex_list(f[4], h.multihash)) {
      throw DataError("hash cache line " + std::to_string(lineno) + ": malformed");
    }
    h.image_id = f[0];
    put(h, variant_from_string(f[1]));
  }
  return true;
}

void HashCache::write(std::ostream& out) const {
  out << kCacheMagic << version_ << '\n';
  for (const auto& [key, value] : lines_) {
    const auto& [digest, e] = value;
    out << key.first << '\t' << to_string(key.second) << '\t' << digest.hex() << '\t'
        << e.phash.hex() << '\t' << (e.multihash.empty() ? "-" : e.multihash.hex_list())
        << '\n';
  }
}

const HashCache::Entry* HashCache::find(ImageVariant v, const ContentDigest& d) const {
  const auto it = by_digest_.find({v, d});
  return it == by_digest_.end() ? nullptr : &it->second;
}

void HashCache::put(const ImageHashes& h, ImageVariant v) {
  Entry e{h.phash, h.multihash};
  by_digest_[{v, h.digest}] = e;
  lines_[{h.image_id, v}] = {h.digest, std::move(e)};
}

HashScan compute_hashes(const corpus::Manifest& manifest, const ContentProvider& provider,
                        ImageVariant variant, const ScanConfig& config, HashCache* cache) {
  config.validate();
  const auto& records = manifest.records();
  const std::size_t n = records.size();
  std::vector<std::optional<ImageHashes>> slots(n);
  std::vector<std::optional<ImageFailure>> failed(n);
  std::vector<char> hit(n, 0);

  parallel_for(n, config.workers, [&](std::size_t i) {
    const auto& rec = records[i];
    try {
      const auto bytes = provider.identity_bytes(rec);
      ImageHashes h;
      h.image_id = rec.image_id;
      h.digest = content_digest(bytes);
      if (cache) {
        if (const auto* e = cache->find(variant, h.digest)) {
          h.phash = e->phash;
          h.multihash = e->multihash;
          hit[i] = 1;
          slots[i] = std::move(h);
          return;
        }
      }
      const auto img = provider.pixels(rec, bytes);
      h.phash = phash(img);
      if (config.crop_resistant) h.multihash = crop_resistant_hash(img, config.crop);
      slots[i] = std::move(h);
    } catch (const ImageSkipped& e) {
      failed[i] = ImageFailure{rec.image_id, e.reason(), e.what()};
    } catch (const DecodeError& e) {
      failed[i] = ImageFailure{rec.image_id, "decode_error", e.what()};
    } catch (const IoError& e) {
      failed[i] = ImageFailure{rec.image_id, "io_error", e.what()};
    }
  });

  HashScan scan;
  scan.variant = variant;
  for (std::size_t i = 0; i < n; ++i) {
    if (slots[i]) {
      if (cache) cache->put(*slots[i], variant);
      scan.cache_hits += hit[i];
      scan.images.push_back(std::move(*slots[i]));
    } else if (failed[i]) {
      scan.failures.push_back(std::move(*failed[i]));
    }
  }
  return scan;
}

std::vector<std::pair<std::size_t, std::size_t>> phash_pairs(std::span<const ImageHashes> images,
                                                             int max_distance) {
  BkTree tree;
  for (std::size_t i = 0; i < images.size(); ++i) tree.insert(images[i].phash.bits, i);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < images.size(); ++i) {
    tree.query(images[i].phash.bits, max_distance, [&](std::size_t j, int) {
      if (j > i) out.emplace_back(i, j);
    });
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> crop_resistant_pairs(
    std::span<const ImageHashes> images, const MatchParams& params, unsigned workers) {
  // Any match needs at least one segment pair within the cutoff, so a radius
  // query per segment finds every candidate.
  BkTree tree;
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (const auto& s : images[i].multihash.segment_hashes) tree.insert(s.bits, i);
  }
  const int radius = params.hamming_cutoff();
  std::vector<std::vector<std::size_t>> partners(images.size());
  parallel_for(images.size(), workers, [&](std::size_t i) {
    std::vector<std::size_t> cand;
    for (const auto& s : images[i].multihash.segment_hashes) {
      tree.query(s.bits, radius, [&](std::size_t j, int) {
        if (j > i) cand.push_back(j);
      });
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    for (std::size_t j : cand) {
      if (multihash_match(images[i].multihash, images[j].multihash, params)) {
        partners[i].push_back(j);
      }
    }
  });
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t j : partners[i]) out.emplace_back(i, j);
  }
  return out;
}

namespace {

void add_components(std::span<const ImageHashes> images,
                    const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                    DupSource source, ImageVariant variant, std::vector<RawDupSet>& out) {
  UnionFind uf(images.size());
  for (const auto& [i, j] : pairs) uf.unite(i, j);
  for (const auto& comp : uf.components(2)) {
    RawDupSet s{{}, source, variant};
    for (std::size_t k : comp) s.members.push_back(images[k].image_id);
    std::sort(s.members.begin(), s.members.end());
    out.push_back(std::move(s));
  }
}

}  // namespace

std::vector<RawDupSet> find_duplicate_sets(const HashScan& scan, const ContentReader& read,
                                           const ScanConfig& config) {
  config.validate();
  std::vector<RawDupSet> out;
  const auto& images = scan.images;

  std::vector<std::string> ids;
  std::vector<ContentDigest> digests;
  for (const auto& h : images) {
    ids.push_back(h.image_id);
    digests.push_back(h.digest);
  }
  for (auto& g : find_exact_groups(ids, digests, read)) {
    out.push_back(RawDupSet{std::move(g), DupSource::kExact, scan.variant});
  }

  if (config.phash) {
    if (config.phash_max_distance == 0) {
      std::map<std::uint64_t, std::vector<std::string>> buckets;
      for (const auto& h : images) buckets[h.phash.bits].push_back(h.image_id);
      for (auto& [bits, members] : buckets) {
        if (members.size() < 2) continue;
        std::sort(members.begin(), members.end());
        out.push_back(RawDupSet{std::move(members), DupSource::kPHash, scan.variant});
      }
    } else {
      add_components(images, phash_pairs(images, config.phash_max_distance),
                     DupSource::kPHash, scan.variant, out);
    }
  }

  if (config.crop_resistant) {
    add_components(images, crop_resistant_pairs(images, config.match, config.workers),
                   DupSource::kCropResistant, scan.variant, out);
  }

  std::sort(out.begin(), out.end());
  return out;
}

void write_sets(std::ostream& out, std::span<const RawDupSet> sets) {
  for (const auto& s : sets) {
    out << to_string(s.source) << '\t' << to_string(s.variant);
    for (const auto& m : s.members) out << '\t' << m;
    out << '\n';
  }
}

std::vector<RawDupSet> read_sets(std::istream& in) {
  std::vector<RawDupSet> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto f = text::split(line, '\t');
    if (f.size() < 4) {
      throw DataError("sets line " + std::to_string(lineno) + ": need at least two members");
    }
    RawDupSet s;
    s.source = dup_source_from_string(f[0]);
    s.variant = variant_from_string(f[1]);
    s.members.assign(f.begin() + 2, f.end());
    std::sort(s.members.begin(), s.members.end());
    if (std::adjacent_find(s.members.begin(), s.members.end()) != s.members.end()) {
      throw DataError("sets line " + std::to_string(lineno) + ": repeated member");
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace facedup::hashing
