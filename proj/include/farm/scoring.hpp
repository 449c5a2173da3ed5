#pragma once

#include <vector>

#include <json.hpp>

#include "farm/core.hpp"
#include "farm/pipeline.hpp"

namespace farm {

// Per-class and sample-weighted overall classification accuracy, as percents.
struct AccuracyReport {
  double safe_accuracy = 0.0;
  double unsafe_accuracy = 0.0;
  double overall_accuracy = 0.0;
  int safe_total = 0;
  int safe_correct = 0;
  int unsafe_total = 0;
  int unsafe_correct = 0;
  int parse_failures = 0;
  int retry_exhausted = 0;
  int errors = 0;

  nlohmann::json to_json() const;
};

// Joins each outcome to its gold label and scores it; parse failures and hard
// errors count as incorrect, never excluded. Throws JoinFailure when an
// outcome's scenario is absent from the dataset.
AccuracyReport score(const std::vector<FarmOutcome>& outcomes,
                     const std::vector<SafetyScenario>& dataset);

// (n_safe * safe + n_unsafe * unsafe) / (n_safe + n_unsafe): the overall
// accuracy implied by per-class accuracies and class sizes.
double weighted_overall(double safe_accuracy, double unsafe_accuracy, int n_safe, int n_unsafe);

// Round half up to one decimal place, e.g. 91.35 -> 91.4.
double round1(double value);

}  // namespace farm
