#pragma once

#include <filesystem>
#include <map>
#include <vector>

#include "farm/core.hpp"

namespace farm {

struct DatasetStats {
  int safe = 0;
  int unsafe = 0;
  int unlabeled = 0;

  int total() const { return safe + unsafe + unlabeled; }
};

// Reads a JSONL dataset: one {"id", "prompt", "action", "label"} object per
// line ("label" optional for unscored runs). Blank lines are skipped. Throws
// ParseError (with the line number) and DuplicateId.
std::vector<SafetyScenario> load_dataset(const std::filesystem::path& path);

DatasetStats dataset_stats(const std::vector<SafetyScenario>& scenarios);

// id -> gold label for every labeled scenario.
std::map<std::string, Label> gold_labels(const std::vector<SafetyScenario>& scenarios);

}  // namespace farm
