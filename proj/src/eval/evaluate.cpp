#include "facedup/eval/evaluate.hpp"

#include <algorithm>
#include <ostream>

#include "facedup/error.hpp"
#include "facedup/parallel.hpp"
#include "facedup/text.hpp"

namespace facedup::eval {

PairSet build_pairs(const corpus::Manifest& manifest, const std::string& dataset_id,
                    const features::FeatureStore& store, const std::set<std::string>& excluded,
                    const EvalConfig& config,
                    const std::map<std::string, std::string>& feature_alias) {
  PairSet ps;
  std::vector<const features::FeatureRecord*> feats;
  std::vector<std::size_t> labels;
  std::map<std::string, std::size_t> subject_index;
  std::vector<std::vector<std::size_t>> by_subject;
  std::vector<std::string> missing;
  for (const auto& r : manifest.records()) {
    if (r.dataset_id != dataset_id || excluded.count(r.image_id)) continue;
    const auto alias = feature_alias.find(r.image_id);
    const auto& f = store.get(alias == feature_alias.end() ? r.image_id : alias->second);
    if (!f.embedding || !f.quality) {
      missing.push_back(r.image_id);
      continue;
    }
    const auto [it, added] = subject_index.emplace(r.subject_id, by_subject.size());
    if (added) by_subject.emplace_back();
    by_subject[it->second].push_back(ps.image_ids.size());
    labels.push_back(it->second);
    ps.image_ids.push_back(r.image_id);
    feats.push_back(&f);
  }
  if (!missing.empty()) {
    std::string msg = "missing embedding or quality for " + std::to_string(missing.size()) +
                      " image(s):";
    for (const auto& id : missing) msg += " " + id;
    throw DataError(msg);
  }

  // Manifest order is ascending path order within each subject.
  std::vector<std::pair<std::size_t, std::size_t>> mated;
  for (const auto& members : by_subject) {
    for (const auto& [i, j] : circular_mated_pairs(members.size())) {
      mated.emplace_back(members[i], members[j]);
    }
  }
  const auto nonmated = sample_nonmated(labels, mated.size(), config.seed);

  ps.pairs.resize(mated.size() + nonmated.size());
  parallel_for(ps.pairs.size(), config.workers, [&](std::size_t k) {
    const bool is_mated = k < mated.size();
    const auto [a, b] = is_mated ? mated[k] : nonmated[k - mated.size()];
    const auto& fa = *feats[a];
    const auto& fb = *feats[b];
    auto& p = ps.pairs[k];
    p.a = a;
    p.b = b;
    p.mated = is_mated;
    p.score = features::cosine_similarity(*fa.embedding, *fb.embedding);
    p.pair_quality = std::min(*fa.quality, *fb.quality);
  });
  return ps;
}

MetricsRow compute_metrics(const PairSet& ps, const EvalConfig& config) {
  MetricsRow row;
  row.images = ps.image_ids.size();
  const ScoreSets s(ps.pairs);
  row.mated = s.mated_count();
  row.nonmated = s.nonmated_count();
  row.eer = eer(s);
  row.fnmr_at_1e3 = fnmr_at_fmr(s, 1e-3).fnmr;
  row.fnmr_at_1e2 = fnmr_at_fmr(s, 1e-2).fnmr;
  row.edc_threshold = fnmr_at_fmr(s, config.edc_fmr).threshold;
  row.pauc_fnmr = pauc(edc(ps.pairs, row.edc_threshold, EdcError::kFnmr), 0.0, config.pauc_hi);
  row.pauc_fmr = pauc(edc(ps.pairs, row.edc_threshold, EdcError::kFmr), 0.0, config.pauc_hi);
  return row;
}

std::vector<MetricsRow> evaluate(const corpus::Manifest& manifest, const std::string& variant,
                                 const features::FeatureStore& store,
                                 const std::set<std::string>& excluded, const EvalConfig& config,
                                 const std::map<std::string, std::string>& feature_alias) {
  std::vector<MetricsRow> rows;
  for (const auto& d : manifest.datasets()) {
    auto row = compute_metrics(build_pairs(manifest, d, store, excluded, config, feature_alias),
                               config);
    row.dataset = d;
    row.variant = variant;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_metrics(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << "dataset\tvariant\teer\tfnmr@1e-3\tfnmr@1e-2\tpauc_fnmr\tpauc_fmr\n";
  for (const auto& r : rows) {
    out << r.dataset << '\t' << r.variant << '\t' << text::format_double(r.eer) << '\t'
        << text::format_double(r.fnmr_at_1e3) << '\t' << text::format_double(r.fnmr_at_1e2)
        << '\t' << text::format_double(r.pauc_fnmr) << '\t' << text::format_double(r.pauc_fmr)
        << '\n';
  }
}

}  // namespace facedup::eval
