#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "facedup/corpus/manifest.hpp"
#include "facedup/features/features.hpp"
#include "facedup/hashing/duplicates.hpp"

namespace facedup::dedup {

using corpus::SubjectKey;

/// Disjoint union of overlapping member sets. Members come back sorted,
/// sets ordered by their smallest member; sets below two members vanish.
std::vector<std::vector<std::string>> merge_overlapping_sets(
    std::span<const std::vector<std::string>> sets);

enum class SetKind { kIntra, kInter };
enum class Exactness { kExact, kNear, kMixed };
std::string_view to_string(SetKind k);
std::string_view to_string(Exactness e);

struct MergedDupSet {
  std::vector<std::string> members;  // sorted
  /// Byte-identical subgroups (size >= 2) inside members, each sorted.
  std::vector<std::vector<std::string>> exact_groups;
  std::set<SubjectKey> subjects;
  SetKind kind = SetKind::kIntra;
  Exactness exactness = Exactness::kNear;

  bool operator==(const MergedDupSet&) const = default;
};

/// Fills subjects, kind and exactness from the manifest. Throws DataError
/// for members the manifest does not know.
MergedDupSet make_merged_set(std::vector<std::string> members,
                             std::vector<std::vector<std::string>> exact_groups,
                             const corpus::Manifest& manifest);

/// Merges raw sets of every source and variant. Exact groups are taken from
/// exact sets of the original variant.
std::vector<MergedDupSet> merge_raw_sets(std::span<const hashing::RawDupSet> raw,
                                         const corpus::Manifest& manifest);

enum class FpRule {
  kAnyPair,     // eject every unit touching a below-threshold pair
  kComponents,  // keep connected components of the at-or-above-threshold graph
};
std::string_view to_string(FpRule r);
FpRule fp_rule_from_string(std::string_view s);

struct FilterResult {
  std::vector<MergedDupSet> sets;    // surviving sets, ordered by first member
  std::vector<std::string> ejected;  // images that leave every set, sorted
};

/// Similarity check within a set. Each byte-identical subgroup is one unit
/// whose internal pairs are never compared; images without an embedding
/// take part in no comparison and are retained. A set reduced below two
/// images dissolves; an ejected subgroup of two or more stays a set of its
/// own.
FilterResult false_positive_filter(const MergedDupSet& set, const features::FeatureStore& store,
                                   const corpus::Manifest& manifest, double threshold = 0.40,
                                   FpRule rule = FpRule::kAnyPair);

/// Exact intra-subject sets: smallest relative path. Otherwise highest
/// quality (missing below all), ties to the smallest (dataset_id, rel_path).
std::string select_representative(const MergedDupSet& set, const features::FeatureStore& store,
                                  const corpus::Manifest& manifest);

enum class Verdict { kKeep, kRemove, kMove };
std::string_view to_string(Verdict v);

struct InterDecision {
  Verdict verdict = Verdict::kRemove;
  std::optional<SubjectKey> target;  // for keep and move
  std::string reason;  // kept, moved, no_candidates, below_threshold, margin, no_embedding
  std::map<SubjectKey, double> means;  // per candidate subject with a gallery
};

struct Thresholds {
  double fp = 0.40;      // false-positive similarity threshold
  double assign = 0.40;  // minimum mean similarity for an assignment
  double margin = 0.20;  // minimum lead over the runner-up subject
};

/// Picks the subject for an inter-subject set's representative. `galleries`
/// holds each subject's non-duplicate images that have embeddings.
InterDecision resolve_inter_subject(
    const MergedDupSet& set, const std::string& representative,
    const corpus::Manifest& manifest, const features::FeatureStore& store,
    const std::map<SubjectKey, std::vector<const features::Embedding*>>& galleries,
    double t_sim = 0.40, double t_margin = 0.20);

enum class DedupMode { kPreservative, kFullRemoval };
std::string_view to_string(DedupMode m);
DedupMode dedup_mode_from_string(std::string_view s);

struct DedupConfig {
  Thresholds thresholds;
  FpRule fp_rule = FpRule::kAnyPair;
  DedupMode mode = DedupMode::kPreservative;
  unsigned workers = 1;

  void validate() const;  // throws ConfigError
};

struct DedupAction {
  std::string image_id;
  std::string dataset_id;
  std::string rel_path;
  std::string subject_id;
  Verdict verdict = Verdict::kKeep;
  std::string target_subject;  // for moves
  std::string reason;

  bool operator==(const DedupAction&) const = default;
};

/// Duplicate counts in the style of a dataset overview table, over raw sets.
struct DuplicateCounts {
  std::size_t images = 0;
  std::size_t subjects = 0;
  std::size_t intra = 0;  // images in some raw set within one subject
  std::size_t subjects_with_intra = 0;
  std::size_t inter = 0;  // images in some raw set spanning subjects
  std::size_t subjects_with_inter = 0;
  std::size_t overlap = 0;   // images counted as both
  std::size_t combined = 0;  // images in any raw set

  bool operator==(const DuplicateCounts&) const = default;
};

/// Counts per dataset plus a "*" row over all datasets.
std::map<std::string, DuplicateCounts> count_duplicates(
    const corpus::Manifest& manifest, std::span<const hashing::RawDupSet> raw);

struct StageCounts {
  std::size_t raw_sets = 0;
  std::size_t merged_sets = 0;
  std::size_t merged_members = 0;
  std::size_t exact_intra_sets = 0;
  std::size_t fp_ejected = 0;
  std::size_t fp_dissolved_sets = 0;
  std::size_t resolved_intra_sets = 0;
  std::size_t resolved_inter_sets = 0;
  std::size_t inter_kept = 0;
  std::size_t inter_moved = 0;
  std::size_t inter_removed_no_candidates = 0;
  std::size_t inter_removed_no_embedding = 0;
  std::size_t inter_removed_below_threshold = 0;
  std::size_t inter_removed_margin = 0;
  std::size_t move_collisions = 0;
  std::size_t moves_alongside_target_removals = 0;
  std::size_t kept = 0;  // representatives kept in place
  std::size_t removed = 0;
  std::size_t moved = 0;

  bool operator==(const StageCounts&) const = default;
};

struct DedupPlan {
  std::vector<DedupAction> actions;  // every merged-set member, manifest order
  StageCounts counts;
  std::map<std::string, std::pair<std::size_t, std::size_t>> removed_moved_by_dataset;
};

/// Runs exact intra-subject selection, false-positive correction,
/// representative selection and inter-subject resolution. In full-removal
/// mode every raw-set member is removed instead.
DedupPlan build_plan(const corpus::Manifest& manifest, std::span<const hashing::RawDupSet> raw,
                     const features::FeatureStore& store, const DedupConfig& config);

/// removed.txt: dataset_id \t rel_path
void write_removed(std::ostream& out, const DedupPlan& plan);
/// moved.txt: dataset_id \t rel_path \t old_subject \t new_subject
void write_moved(std::ostream& out, const DedupPlan& plan);
/// plan.tsv: dataset_id \t rel_path \t subject \t verdict \t target \t reason
void write_plan(std::ostream& out, const DedupPlan& plan);

struct Relocation {
  std::string dataset_id;
  std::string old_rel_path;
  std::string new_rel_path;
};

/// Lists parsed back from removed.txt and moved.txt.
struct PlanLists {
  std::vector<std::pair<std::string, std::string>> removed;  // (dataset, rel_path)
  struct Move {
    std::string dataset_id, rel_path, old_subject, new_subject;
  };
  std::vector<Move> moved;
};
PlanLists read_plan_lists(std::istream& removed, std::istream& moved);
PlanLists plan_lists(const DedupPlan& plan);

struct AppliedPlan {
  corpus::Manifest manifest;
  std::vector<Relocation> relocations;  // moved images, manifest order
};

/// Drops removed images and relabels moved ones. A moved image goes into the
/// directory of the target subject's first image, keeping its file name; on
/// a name clash the old subject name and '_' are prefixed.
AppliedPlan apply_plan(const corpus::Manifest& manifest, const PlanLists& lists);

/// Copies every image of the applied manifest from its source location
/// into out_dir/<dataset_id>/<rel_path>.
void materialize(const AppliedPlan& applied, const std::vector<corpus::DatasetRoot>& roots,
                 const std::filesystem::path& out_dir);

}  // namespace facedup::dedup
