#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "farm/scoring.hpp"
#include "farm/uncertainty.hpp"

namespace farm {

// Run metadata echoed into the report so results stay interpretable on disk.
// Holds nothing that varies between a fresh run and a resumed one, so report
// files stay byte-identical either way.
struct ReportMeta {
  std::string model_id;
  std::string source_kind = "none";
  int transform_n = 0;  // 0 when no retrieval was configured
  int samples = 0;
};

nlohmann::json report_json(const ReportMeta& meta, const AccuracyReport& accuracy,
                           const UncertaintyReport& uncertainty);

// Aligned-text accuracy table: one row per class plus the weighted overall.
std::string render_accuracy_table(const AccuracyReport& accuracy);

// Aligned-text table with the four correctness cells; absent cells print "-".
std::string render_uncertainty_table(const UncertaintyReport& uncertainty);

std::string render_report_text(const ReportMeta& meta, const AccuracyReport& accuracy,
                               const UncertaintyReport& uncertainty);

// Writes report.json and report.txt into the directory; returns the JSON path.
std::filesystem::path write_report(const std::filesystem::path& dir, const ReportMeta& meta,
                                   const AccuracyReport& accuracy,
                                   const UncertaintyReport& uncertainty);

}  // namespace farm
