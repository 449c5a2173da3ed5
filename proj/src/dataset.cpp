#include "farm/dataset.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "farm/errors.hpp"
#include "farm/text.hpp"

namespace farm {

using nlohmann::json;

std::vector<SafetyScenario> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Config, "cannot open dataset: " + path.string());
  std::vector<SafetyScenario> scenarios;
  std::set<std::string> seen;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (text::trim(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(Errc::ParseError,
                  path.filename().string() + " line " + std::to_string(line_number) + ": " +
                      e.what());
    }
    SafetyScenario scenario;
    try {
      scenario = validate_scenario(record);
    } catch (const Error& e) {
      throw Error(Errc::ParseError, path.filename().string() + " line " +
                                        std::to_string(line_number) + ": " + e.what());
    }
    if (!seen.insert(scenario.id).second) {
      throw Error(Errc::DuplicateId, "duplicate id \"" + scenario.id + "\" on line " +
                                         std::to_string(line_number));
    }
    scenarios.push_back(std::move(scenario));
  }
  return scenarios;
}

DatasetStats dataset_stats(const std::vector<SafetyScenario>& scenarios) {
  DatasetStats stats;
  for (const auto& s : scenarios) {
    if (!s.gold_label) {
      ++stats.unlabeled;
    } else if (*s.gold_label == Label::Safe) {
      ++stats.safe;
    } else {
      ++stats.unsafe;
    }
  }
  return stats;
}

std::map<std::string, Label> gold_labels(const std::vector<SafetyScenario>& scenarios) {
  std::map<std::string, Label> out;
  for (const auto& s : scenarios) {
    if (s.gold_label) out[s.id] = *s.gold_label;
  }
  return out;
}

}  // namespace farm
