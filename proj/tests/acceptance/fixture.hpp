#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace fixture {

/// Rule fixture: one dataset "fx" with 12 subjects and 40 images, a sidecar
/// with constructed embeddings and qualities, and the plan derived by hand.
struct RuleFixture {
  std::filesystem::path root;     // dataset root
  std::filesystem::path sidecar;
  /// Merged duplicate sets the hashing stage must find (image ids, sorted).
  std::vector<std::vector<std::string>> expected_sets;
  std::string expected_plan;      // plan.tsv contents
};

RuleFixture write_rule_fixture(const std::filesystem::path& dir);

}  // namespace fixture
