#include "facedup/dedup/dedup.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <tuple>

#include "facedup/error.hpp"
#include "facedup/parallel.hpp"
#include "facedup/text.hpp"
#include "facedup/union_find.hpp"

namespace facedup::dedup {

using corpus::Manifest;
using features::FeatureStore;

std::string_view to_string(SetKind k) { return k == SetKind::kIntra ? "intra" : "inter"; }

std::string_view to_string(Exactness e) {
  switch (e) {
    case Exactness::kExact: return "exact";
    case Exactness::kNear: return "near";
    case Exactness::kMixed: return "mixed";
  }
  return "?";
}

std::string_view to_string(FpRule r) {
  return r == FpRule::kAnyPair ? "any_pair" : "components";
}

FpRule fp_rule_from_string(std::string_view s) {
  if (s == "any_pair") return FpRule::kAnyPair;
  if (s == "components") return FpRule::kComponents;
  throw ConfigError("unknown false-positive rule: " + std::string(s));
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kKeep: return "keep";
    case Verdict::kRemove: return "remove";
    case Verdict::kMove: return "move";
  }
  return "?";
}

std::string_view to_string(DedupMode m) {
  return m == DedupMode::kPreservative ? "preservative" : "full_removal";
}

DedupMode dedup_mode_from_string(std::string_view s) {
  if (s == "preservative") return DedupMode::kPreservative;
  if (s == "full_removal" || s == "full-removal") return DedupMode::kFullRemoval;
  throw ConfigError("unknown dedup mode: " + std::string(s));
}

void DedupConfig::validate() const {
  for (double t : {thresholds.fp, thresholds.assign, thresholds.margin}) {
    if (!(t >= -1.0 && t <= 1.0)) throw ConfigError("thresholds must lie in [-1, 1]");
  }
  if (workers == 0) throw ConfigError("workers must be at least 1");
}

std::vector<std::vector<std::string>> merge_overlapping_sets(
    std::span<const std::vector<std::string>> sets) {
  std::map<std::string_view, std::size_t> index;
  std::vector<std::string_view> names;
  for (const auto& s : sets) {
    for (const auto& m : s) {
      if (index.emplace(m, names.size()).second) names.push_back(m);
    }
  }
  UnionFind uf(names.size());
  for (const auto& s : sets) {
    for (std::size_t k = 1; k < s.size(); ++k) uf.unite(index.at(s[0]), index.at(s[k]));
  }
  std::vector<std::vector<std::string>> out;
  for (const auto& comp : uf.components(2)) {
    std::vector<std::string> members;
    for (std::size_t i : comp) members.emplace_back(names[i]);
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  std::sort(out.begin(), out.end());
  return out;
}

MergedDupSet make_merged_set(std::vector<std::string> members,
                             std::vector<std::vector<std::string>> exact_groups,
                             const Manifest& manifest) {
  MergedDupSet s;
  std::sort(members.begin(), members.end());
  for (const auto& m : members) {
    const auto idx = manifest.find(m);
    if (!idx) throw DataError("duplicate set member not in manifest: " + m);
    const auto& r = manifest.records()[*idx];
    s.subjects.emplace(r.dataset_id, r.subject_id);
  }
  for (auto& g : exact_groups) std::sort(g.begin(), g.end());
  std::sort(exact_groups.begin(), exact_groups.end());
  s.kind = s.subjects.size() == 1 ? SetKind::kIntra : SetKind::kInter;
  if (exact_groups.empty()) {
    s.exactness = Exactness::kNear;
  } else if (exact_groups.size() == 1 && exact_groups[0].size() == members.size()) {
    s.exactness = Exactness::kExact;
  } else {
    s.exactness = Exactness::kMixed;
  }
  s.members = std::move(members);
  s.exact_groups = std::move(exact_groups);
  return s;
}

std::vector<MergedDupSet> merge_raw_sets(std::span<const hashing::RawDupSet> raw,
                                         const Manifest& manifest) {
  std::vector<std::vector<std::string>> all, exact;
  for (const auto& s : raw) {
    all.push_back(s.members);
    if (s.source == hashing::DupSource::kExact && s.variant == hashing::ImageVariant::kOriginal) {
      exact.push_back(s.members);
    }
  }
  const auto merged = merge_overlapping_sets(all);
  const auto groups = merge_overlapping_sets(exact);
  std::map<std::string_view, std::size_t> set_of;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    for (const auto& m : merged[i]) set_of[m] = i;
  }
  std::vector<std::vector<std::vector<std::string>>> groups_of(merged.size());
  for (const auto& g : groups) groups_of[set_of.at(g.front())].push_back(g);
  std::vector<MergedDupSet> out;
  out.reserve(merged.size());
  for (std::size_t i = 0; i < merged.size(); ++i) {
    out.push_back(make_merged_set(merged[i], std::move(groups_of[i]), manifest));
  }
  return out;
}

FilterResult false_positive_filter(const MergedDupSet& set, const FeatureStore& store,
                                   const Manifest& manifest, double threshold, FpRule rule) {
  // Units: each byte-identical subgroup, then every remaining member alone.
  std::vector<std::vector<std::string>> units;
  std::vector<char> is_group;
  std::set<std::string_view> grouped;
  for (const auto& g : set.exact_groups) {
    units.push_back(g);
    is_group.push_back(1);
    grouped.insert(g.begin(), g.end());
  }
  for (const auto& m : set.members) {
    if (!grouped.count(m)) {
      units.push_back({m});
      is_group.push_back(0);
    }
  }
  std::vector<std::size_t> order(units.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return units[a].front() < units[b].front(); });
  {
    std::vector<std::vector<std::string>> u2;
    std::vector<char> g2;
    for (std::size_t i : order) {
      u2.push_back(std::move(units[i]));
      g2.push_back(is_group[i]);
    }
    units = std::move(u2);
    is_group = std::move(g2);
  }

  const std::size_t n = units.size();
  std::vector<std::vector<const features::Embedding*>> emb(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (const auto& m : units[u]) {
      if (const auto* e = store.embedding(m)) emb[u].push_back(e);
    }
  }
  auto below = [&](std::size_t u, std::size_t v) {
    for (const auto* a : emb[u]) {
      for (const auto* b : emb[v]) {
        if (features::cosine_similarity(*a, *b) < threshold) return true;
      }
    }
    return false;
  };

  std::vector<std::vector<std::size_t>> groups_of_units;
  std::vector<std::size_t> leftover;
  if (rule == FpRule::kAnyPair) {
    std::vector<char> ejected(n, 0);
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = u + 1; v < n; ++v) {
        if (below(u, v)) ejected[u] = ejected[v] = 1;
      }
    }
    std::vector<std::size_t> kept;
    for (std::size_t u = 0; u < n; ++u) {
      if (ejected[u]) {
        groups_of_units.push_back({u});
      } else {
        kept.push_back(u);
      }
    }
    if (!kept.empty()) groups_of_units.push_back(kept);
  } else {
    UnionFind uf(n);
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = u + 1; v < n; ++v) {
        if (!below(u, v)) uf.unite(u, v);
      }
    }
    groups_of_units = uf.components(1);
  }

  FilterResult result;
  for (const auto& g : groups_of_units) {
    std::vector<std::string> members;
    std::vector<std::vector<std::string>> exact;
    for (std::size_t u : g) {
      members.insert(members.end(), units[u].begin(), units[u].end());
      if (is_group[u]) exact.push_back(units[u]);
    }
    if (members.size() < 2) {
      result.ejected.insert(result.ejected.end(), members.begin(), members.end());
    } else {
      result.sets.push_back(make_merged_set(std::move(members), std::move(exact), manifest));
    }
  }
  std::sort(result.ejected.begin(), result.ejected.end());
  std::sort(result.sets.begin(), result.sets.end(),
            [](const auto& a, const auto& b) { return a.members.front() < b.members.front(); });
  return result;
}

std::string select_representative(const MergedDupSet& set, const FeatureStore& store,
                                  const Manifest& manifest) {
  if (set.members.empty()) throw Error("select_representative: empty set");
  const auto& recs = manifest.records();
  auto rec = [&](const std::string& id) -> const corpus::ImageRecord& {
    return recs[*manifest.find(id)];
  };
  const std::string* best = &set.members.front();
  if (set.exactness == Exactness::kExact && set.kind == SetKind::kIntra) {
    for (const auto& m : set.members) {
      if (rec(m).rel_path < rec(*best).rel_path) best = &m;
    }
    return *best;
  }
  for (const auto& m : set.members) {
    const auto qm = store.quality(m);
    const auto qb = store.quality(*best);
    if (features::quality_less(qb, qm)) {
      best = &m;
    } else if (!features::quality_less(qm, qb)) {
      const auto& rm = rec(m);
      const auto& rb = rec(*best);
      if (std::tie(rm.dataset_id, rm.rel_path) < std::tie(rb.dataset_id, rb.rel_path)) best = &m;
    }
  }
  return *best;
}

InterDecision resolve_inter_subject(
    const MergedDupSet& set, const std::string& representative, const Manifest& manifest,
    const FeatureStore& store,
    const std::map<SubjectKey, std::vector<const features::Embedding*>>& galleries,
    double t_sim, double t_margin) {
  InterDecision d;
  const auto* probe = store.embedding(representative);
  std::vector<SubjectKey> candidates;
  for (const auto& s : set.subjects) {
    const auto it = galleries.find(s);
    if (it != galleries.end() && !it->second.empty()) candidates.push_back(s);
  }
  if (candidates.empty()) {
    d.reason = "no_candidates";
    return d;
  }
  if (!probe) {
    d.reason = "no_embedding";
    return d;
  }
  for (const auto& s : candidates) {
    d.means[s] = *features::mean_similarity(*probe, galleries.at(s));
  }
  // Ties go to the earlier subject key.
  const SubjectKey* best = nullptr;
  for (const auto& [s, mean] : d.means) {
    if (!best || mean > d.means.at(*best)) best = &s;
  }
  const double best_mean = d.means.at(*best);
  if (best_mean < t_sim) {
    d.reason = "below_threshold";
    return d;
  }
  if (d.means.size() >= 2) {
    double second = -INFINITY;
    for (const auto& [s, mean] : d.means) {
      if (&s != best) second = std::max(second, mean);
    }
    if (std::abs(best_mean - second) < t_margin) {
      d.reason = "margin";
      return d;
    }
  }
  const auto& r = manifest.at(representative);
  d.target = *best;
  if (*best == SubjectKey{r.dataset_id, r.subject_id}) {
    d.verdict = Verdict::kKeep;
    d.reason = "kept";
  } else {
    d.verdict = Verdict::kMove;
    d.reason = "moved";
  }
  return d;
}

std::map<std::string, DuplicateCounts> count_duplicates(
    const Manifest& manifest, std::span<const hashing::RawDupSet> raw) {
  const auto& recs = manifest.records();
  std::vector<char> in_intra(recs.size(), 0), in_inter(recs.size(), 0);
  for (const auto& s : raw) {
    std::set<SubjectKey> subjects;
    std::vector<std::size_t> idx;
    for (const auto& m : s.members) {
      const auto i = manifest.find(m);
      if (!i) throw DataError("duplicate set member not in manifest: " + m);
      idx.push_back(*i);
      subjects.emplace(recs[*i].dataset_id, recs[*i].subject_id);
    }
    auto& flag = subjects.size() == 1 ? in_intra : in_inter;
    for (std::size_t i : idx) flag[i] = 1;
  }
  std::map<std::string, DuplicateCounts> out;
  std::map<std::string, std::set<std::string>> subjects, with_intra, with_inter;
  for (const auto& d : manifest.datasets()) out[d];
  out["*"];
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    for (const std::string& key : {r.dataset_id, std::string("*")}) {
      const std::string subj = key == "*" ? r.dataset_id + "/" + r.subject_id : r.subject_id;
      auto& c = out[key];
      ++c.images;
      subjects[key].insert(subj);
      c.intra += in_intra[i];
      c.inter += in_inter[i];
      c.overlap += in_intra[i] && in_inter[i];
      c.combined += in_intra[i] || in_inter[i];
      if (in_intra[i]) with_intra[key].insert(subj);
      if (in_inter[i]) with_inter[key].insert(subj);
    }
  }
  for (auto& [key, c] : out) {
    c.subjects = subjects[key].size();
    c.subjects_with_intra = with_intra[key].size();
    c.subjects_with_inter = with_inter[key].size();
  }
  return out;
}

namespace {

struct SetOutcome {
  std::vector<DedupAction> actions;
  StageCounts counts;
};

DedupAction make_action(const corpus::ImageRecord& r, Verdict v, std::string reason,
                        std::string target = {}) {
  return DedupAction{r.image_id, r.dataset_id, r.rel_path, r.subject_id, v,
                     std::move(target), std::move(reason)};
}

void add_counts(StageCounts& a, const StageCounts& b) {
  a.exact_intra_sets += b.exact_intra_sets;
  a.fp_ejected += b.fp_ejected;
  a.fp_dissolved_sets += b.fp_dissolved_sets;
  a.resolved_intra_sets += b.resolved_intra_sets;
  a.resolved_inter_sets += b.resolved_inter_sets;
  a.inter_kept += b.inter_kept;
  a.inter_moved += b.inter_moved;
  a.inter_removed_no_candidates += b.inter_removed_no_candidates;
  a.inter_removed_no_embedding += b.inter_removed_no_embedding;
  a.inter_removed_below_threshold += b.inter_removed_below_threshold;
  a.inter_removed_margin += b.inter_removed_margin;
}

// Applies the inter-subject decision to one filtered set.
void resolve_set(const MergedDupSet& s, const Manifest& manifest, const FeatureStore& store,
                 const std::map<SubjectKey, std::vector<const features::Embedding*>>& galleries,
                 const DedupConfig& config, SetOutcome& out) {
  const auto rep = select_representative(s, store, manifest);
  if (s.kind == SetKind::kIntra) {
    ++out.counts.resolved_intra_sets;
    for (const auto& m : s.members) {
      const auto& r = manifest.at(m);
      out.actions.push_back(m == rep ? make_action(r, Verdict::kKeep, "representative")
                                     : make_action(r, Verdict::kRemove, "duplicate"));
    }
    return;
  }
  ++out.counts.resolved_inter_sets;
  auto d = resolve_inter_subject(s, rep, manifest, store, galleries, config.thresholds.assign,
                                 config.thresholds.margin);
  std::string keep_id = rep;
  if (d.verdict == Verdict::kMove) {
    // A byte-identical copy already in the target subject is kept in place
    // and the representative is dropped instead of moved.
    for (const auto& g : s.exact_groups) {
      if (!std::binary_search(g.begin(), g.end(), rep)) continue;
      for (const auto& m : g) {
        const auto& r = manifest.at(m);
        if (SubjectKey{r.dataset_id, r.subject_id} == *d.target) {
          keep_id = m;
          d.verdict = Verdict::kKeep;
          d.reason = "move_collision";
          break;
        }
      }
    }
  }
  switch (d.verdict) {
    case Verdict::kKeep:
      ++out.counts.inter_kept;
      break;
    case Verdict::kMove:
      ++out.counts.inter_moved;
      break;
    case Verdict::kRemove:
      if (d.reason == "no_candidates") ++out.counts.inter_removed_no_candidates;
      if (d.reason == "no_embedding") ++out.counts.inter_removed_no_embedding;
      if (d.reason == "below_threshold") ++out.counts.inter_removed_below_threshold;
      if (d.reason == "margin") ++out.counts.inter_removed_margin;
      break;
  }
  for (const auto& m : s.members) {
    const auto& r = manifest.at(m);
    if (d.verdict == Verdict::kKeep && m == keep_id) {
      out.actions.push_back(make_action(r, Verdict::kKeep, d.reason));
    } else if (d.verdict == Verdict::kMove && m == rep) {
      out.actions.push_back(make_action(r, Verdict::kMove, d.reason, d.target->second));
    } else {
      out.actions.push_back(make_action(r, Verdict::kRemove, m == rep ? d.reason : "duplicate"));
    }
  }
}

}  // namespace

DedupPlan build_plan(const Manifest& manifest, std::span<const hashing::RawDupSet> raw,
                     const FeatureStore& store, const DedupConfig& config) {
  config.validate();
  DedupPlan plan;
  const auto& recs = manifest.records();
  std::vector<char> in_raw(recs.size(), 0);
  for (const auto& s : raw) {
    for (const auto& m : s.members) {
      const auto i = manifest.find(m);
      if (!i) throw DataError("duplicate set member not in manifest: " + m);
      in_raw[*i] = 1;
    }
  }
  plan.counts.raw_sets = raw.size();

  const auto merged = merge_raw_sets(raw, manifest);
  plan.counts.merged_sets = merged.size();
  for (const auto& s : merged) plan.counts.merged_members += s.members.size();

  if (config.mode == DedupMode::kFullRemoval) {
    for (std::size_t i = 0; i < recs.size(); ++i) {
      if (in_raw[i]) plan.actions.push_back(make_action(recs[i], Verdict::kRemove, "full_removal"));
    }
  } else {
    std::map<SubjectKey, std::vector<const features::Embedding*>> galleries;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      if (in_raw[i]) continue;
      if (const auto* e = store.embedding(recs[i].image_id)) {
        galleries[{recs[i].dataset_id, recs[i].subject_id}].push_back(e);
      }
    }

    std::vector<SetOutcome> outcomes(merged.size());
    parallel_for(merged.size(), config.workers, [&](std::size_t k) {
      const auto& s = merged[k];
      auto& out = outcomes[k];
      if (s.exactness == Exactness::kExact && s.kind == SetKind::kIntra) {
        ++out.counts.exact_intra_sets;
        const auto rep = select_representative(s, store, manifest);
        for (const auto& m : s.members) {
          const auto& r = manifest.at(m);
          out.actions.push_back(m == rep ? make_action(r, Verdict::kKeep, "representative")
                                         : make_action(r, Verdict::kRemove, "exact_duplicate"));
        }
        return;
      }
      std::vector<MergedDupSet> parts;
      if (s.exactness == Exactness::kExact) {
        parts.push_back(s);
      } else {
        auto filtered =
            false_positive_filter(s, store, manifest, config.thresholds.fp, config.fp_rule);
        out.counts.fp_ejected += filtered.ejected.size();
        if (filtered.sets.empty()) ++out.counts.fp_dissolved_sets;
        for (const auto& m : filtered.ejected) {
          out.actions.push_back(make_action(manifest.at(m), Verdict::kKeep, "fp_ejected"));
        }
        parts = std::move(filtered.sets);
      }
      for (const auto& p : parts) resolve_set(p, manifest, store, galleries, config, out);
    });
    for (auto& o : outcomes) {
      add_counts(plan.counts, o.counts);
      for (auto& a : o.actions) plan.actions.push_back(std::move(a));
    }
  }

  std::sort(plan.actions.begin(), plan.actions.end(), [](const auto& a, const auto& b) {
    return std::tie(a.dataset_id, a.rel_path) < std::tie(b.dataset_id, b.rel_path);
  });

  // Moves whose target subject also loses near-duplicates of the moved image.
  for (const auto& s : merged) {
    std::set<SubjectKey> move_targets;
    std::set<SubjectKey> removed_subjects;
    for (const auto& m : s.members) {
      const auto it = std::lower_bound(
          plan.actions.begin(), plan.actions.end(), manifest.at(m),
          [](const DedupAction& a, const corpus::ImageRecord& r) {
            return std::tie(a.dataset_id, a.rel_path) < std::tie(r.dataset_id, r.rel_path);
          });
      if (it == plan.actions.end() || it->image_id != m) continue;
      if (it->verdict == Verdict::kMove) move_targets.emplace(it->dataset_id, it->target_subject);
      if (it->verdict == Verdict::kRemove) removed_subjects.emplace(it->dataset_id, it->subject_id);
    }
    for (const auto& t : move_targets) {
      plan.counts.moves_alongside_target_removals += removed_subjects.count(t);
    }
  }

  for (const auto& a : plan.actions) {
    auto& [rm, mv] = plan.removed_moved_by_dataset[a.dataset_id];
    switch (a.verdict) {
      case Verdict::kRemove:
        ++plan.counts.removed;
        ++rm;
        break;
      case Verdict::kMove:
        ++plan.counts.moved;
        ++mv;
        break;
      case Verdict::kKeep:
        if (a.reason == "move_collision") ++plan.counts.move_collisions;
        if (a.reason != "fp_ejected") ++plan.counts.kept;
        break;
    }
  }
  for (const auto& d : manifest.datasets()) plan.removed_moved_by_dataset[d];
  return plan;
}

void write_removed(std::ostream& out, const DedupPlan& plan) {
  for (const auto& a : plan.actions) {
    if (a.verdict == Verdict::kRemove) out << a.dataset_id << '\t' << a.rel_path << '\n';
  }
}

void write_moved(std::ostream& out, const DedupPlan& plan) {
  for (const auto& a : plan.actions) {
    if (a.verdict == Verdict::kMove) {
      out << a.dataset_id << '\t' << a.rel_path << '\t' << a.subject_id << '\t'
          << a.target_subject << '\n';
    }
  }
}

void write_plan(std::ostream& out, const DedupPlan& plan) {
  for (const auto& a : plan.actions) {
    out << a.dataset_id << '\t' << a.rel_path << '\t' << a.subject_id << '\t'
        << to_string(a.verdict) << '\t' << (a.target_subject.empty() ? "-" : a.target_subject)
        << '\t' << a.reason << '\n';
  }
}

PlanLists plan_lists(const DedupPlan& plan) {
  PlanLists l;
  for (const auto& a : plan.actions) {
    if (a.verdict == Verdict::kRemove) l.removed.emplace_back(a.dataset_id, a.rel_path);
    if (a.verdict == Verdict::kMove) {
      l.moved.push_back({a.dataset_id, a.rel_path, a.subject_id, a.target_subject});
    }
  }
  return l;
}

PlanLists read_plan_lists(std::istream& removed, std::istream& moved) {
  PlanLists l;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(removed, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = text::split(line, '\t');
    if (f.size() != 2) throw DataError("removed list line " + std::to_string(lineno) + ": need 2 fields");
    l.removed.emplace_back(f[0], f[1]);
  }
  lineno = 0;
  while (std::getline(moved, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = text::split(line, '\t');
    if (f.size() != 4) throw DataError("moved list line " + std::to_string(lineno) + ": need 4 fields");
    l.moved.push_back({f[0], f[1], f[2], f[3]});
  }
  return l;
}

AppliedPlan apply_plan(const Manifest& manifest, const PlanLists& lists) {
  std::set<std::pair<std::string, std::string>> removed(lists.removed.begin(),
                                                        lists.removed.end());
  std::map<std::pair<std::string, std::string>, const PlanLists::Move*> moves;
  for (const auto& m : lists.moved) {
    if (removed.count({m.dataset_id, m.rel_path})) {
      throw DataError("image both removed and moved: " + m.dataset_id + "/" + m.rel_path);
    }
    moves[{m.dataset_id, m.rel_path}] = &m;
  }
  std::map<SubjectKey, std::string> subject_dir;
  std::set<std::pair<std::string, std::string>> taken;
  for (const auto& r : manifest.records()) {
    const auto slash = r.rel_path.rfind('/');
    subject_dir.emplace(SubjectKey{r.dataset_id, r.subject_id},
                        slash == std::string::npos ? std::string() : r.rel_path.substr(0, slash));
    if (!removed.count({r.dataset_id, r.rel_path}) && !moves.count({r.dataset_id, r.rel_path})) {
      taken.emplace(r.dataset_id, r.rel_path);
    }
  }
  for (const auto& key : removed) {
    if (!manifest.find(corpus::make_image_id(key.first, key.second))) {
      throw DataError("removed image not in manifest: " + key.first + "/" + key.second);
    }
  }

  AppliedPlan out;
  std::vector<corpus::ImageRecord> kept;
  for (const auto& r : manifest.records()) {
    const std::pair<std::string, std::string> key{r.dataset_id, r.rel_path};
    if (removed.count(key)) continue;
    const auto mv = moves.find(key);
    if (mv == moves.end()) {
      kept.push_back(r);
      continue;
    }
    const auto& m = *mv->second;
    if (m.old_subject != r.subject_id) {
      throw DataError("moved image subject mismatch: " + r.image_id);
    }
    const auto dir = subject_dir.find({r.dataset_id, m.new_subject});
    if (dir == subject_dir.end()) {
      throw DataError("move target subject not in manifest: " + m.new_subject);
    }
    const auto slash = r.rel_path.rfind('/');
    const std::string base = slash == std::string::npos ? r.rel_path : r.rel_path.substr(slash + 1);
    const std::string prefix = dir->second.empty() ? "" : dir->second + "/";
    std::string path = prefix + base;
    if (taken.count({r.dataset_id, path})) path = prefix + m.old_subject + "_" + base;
    for (int k = 2; taken.count({r.dataset_id, path}); ++k) {
      path = prefix + m.old_subject + "_" + std::to_string(k) + "_" + base;
    }
    taken.emplace(r.dataset_id, path);
    corpus::ImageRecord moved = r;
    moved.rel_path = path;
    moved.subject_id = m.new_subject;
    moved.image_id = corpus::make_image_id(r.dataset_id, path);
    out.relocations.push_back({r.dataset_id, r.rel_path, path});
    kept.push_back(std::move(moved));
  }
  out.manifest = Manifest(std::move(kept));
  return out;
}

void materialize(const AppliedPlan& applied, const std::vector<corpus::DatasetRoot>& roots,
                 const std::filesystem::path& out_dir) {
  std::map<std::string, std::filesystem::path> root_of;
  for (const auto& r : roots) root_of[r.dataset_id] = r.directory;
  std::map<std::pair<std::string, std::string>, std::string> origin;
  for (const auto& rel : applied.relocations) {
    origin[{rel.dataset_id, rel.new_rel_path}] = rel.old_rel_path;
  }
  for (const auto& r : applied.manifest.records()) {
    const auto root = root_of.find(r.dataset_id);
    if (root == root_of.end()) throw IoError("no root for dataset " + r.dataset_id);
    const auto o = origin.find({r.dataset_id, r.rel_path});
    const std::string src_rel = o == origin.end() ? r.rel_path : o->second;
    const auto dst = out_dir / r.dataset_id / r.rel_path;
    std::error_code ec;
    std::filesystem::create_directories(dst.parent_path(), ec);
    std::filesystem::copy_file(root->second / src_rel, dst,
                               std::filesystem::copy_options::overwrite_existing, ec);
    if (ec) throw IoError("cannot copy " + src_rel + ": " + ec.message());
  }
}

}  // namespace facedup::dedup
