#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "farm/pipeline.hpp"

namespace farm {

enum class AnnotationKind { FoveationRating, RationaleRating };

// Split a CSV line record into fields (RFC 4180 quoting); join fields back.
std::vector<std::string> csv_split(const std::string& line);
std::string csv_join(const std::vector<std::string>& fields);

// Writes an annotation-ready CSV with empty rating columns.
//  - FoveationRating: scenario_id,question,foveation,attempt,rating
//    (rating to be filled with SE = semantic error, GE = grammatical error,
//    or CF = correct foveation)
//  - RationaleRating: scenario_id,question,gold_label,predicted_label,
//    cited_source,rationale,factuality_error,entailment_error,
//    attribution_error (flag cells to be filled with 1 or 0)
std::filesystem::path export_annotations(const std::vector<FarmOutcome>& outcomes,
                                         const std::vector<SafetyScenario>& dataset,
                                         AnnotationKind kind, const std::filesystem::path& path);

// Percentage layout over annotation categories among rated rows.
struct RatingDistribution {
  std::map<std::string, int> counts;  // category -> rated rows in it
  int rated = 0;
  int total_rows = 0;

  double percent(const std::string& category) const;
};

// Reads back a filled-in annotation CSV and tallies the categories: rating
// values for foveations, set error flags for rationales. Rows left blank are
// counted as unrated. Throws ParseError on unknown categories or bad shape.
RatingDistribution import_annotations(const std::filesystem::path& path, AnnotationKind kind);

}  // namespace farm
