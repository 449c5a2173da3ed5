#include "farm/report.hpp"

#include <cstdio>
#include <fstream>

#include "farm/errors.hpp"

namespace farm {

using nlohmann::json;

namespace {

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

void cell_row(std::string& out, const char* name, const std::optional<UncertaintyCell>& cell) {
  out += pad_right(name, 18);
  if (cell) {
    out += pad_left(std::to_string(cell->count), 6);
    out += pad_left(fixed(cell->mean_entropy, 4), 15);
    out += pad_left(fixed(cell->mean_perplexity, 4), 18);
  } else {
    out += pad_left("-", 6);
    out += pad_left("-", 15);
    out += pad_left("-", 18);
  }
  out += '\n';
}

}  // namespace

json report_json(const ReportMeta& meta, const AccuracyReport& accuracy,
                 const UncertaintyReport& uncertainty) {
  return {{"run",
           {{"model_id", meta.model_id},
            {"source_kind", meta.source_kind},
            {"transform_n", meta.transform_n},
            {"samples", meta.samples}}},
          {"accuracy", accuracy.to_json()},
          {"uncertainty", uncertainty.to_json()}};
}

std::string render_accuracy_table(const AccuracyReport& accuracy) {
  std::string out;
  out += pad_right("class", 10) + pad_left("accuracy", 10) + pad_left("correct", 10) +
         pad_left("total", 8) + '\n';
  auto row = [&out](const char* name, double acc, int correct, int total) {
    out += pad_right(name, 10);
    out += pad_left(total > 0 ? fixed(acc, 1) : "-", 10);
    out += pad_left(std::to_string(correct), 10);
    out += pad_left(std::to_string(total), 8);
    out += '\n';
  };
  row("safe", accuracy.safe_accuracy, accuracy.safe_correct, accuracy.safe_total);
  row("unsafe", accuracy.unsafe_accuracy, accuracy.unsafe_correct, accuracy.unsafe_total);
  row("overall", accuracy.overall_accuracy, accuracy.safe_correct + accuracy.unsafe_correct,
      accuracy.safe_total + accuracy.unsafe_total);
  out += "\nparse failures: " + std::to_string(accuracy.parse_failures) +
         "  retrieval retries exhausted: " + std::to_string(accuracy.retry_exhausted) +
         "  errors: " + std::to_string(accuracy.errors) + '\n';
  return out;
}

std::string render_uncertainty_table(const UncertaintyReport& uncertainty) {
  std::string out;
  out += pad_right("cell", 18) + pad_left("count", 6) + pad_left("mean entropy", 15) +
         pad_left("mean perplexity", 18) + '\n';
  cell_row(out, "safe-correct", uncertainty.safe_correct);
  cell_row(out, "safe-incorrect", uncertainty.safe_incorrect);
  cell_row(out, "unsafe-correct", uncertainty.unsafe_correct);
  cell_row(out, "unsafe-incorrect", uncertainty.unsafe_incorrect);
  return out;
}

std::string render_report_text(const ReportMeta& meta, const AccuracyReport& accuracy,
                               const UncertaintyReport& uncertainty) {
  std::string out;
  out += "model: " + meta.model_id + "\n";
  out += "source: " + meta.source_kind;
  if (meta.transform_n > 0) out += "  snippets: " + std::to_string(meta.transform_n);
  out += "\nsamples: " + std::to_string(meta.samples) + "\n\n";
  out += render_accuracy_table(accuracy);
  out += '\n';
  out += render_uncertainty_table(uncertainty);
  return out;
}

std::filesystem::path write_report(const std::filesystem::path& dir, const ReportMeta& meta,
                                   const AccuracyReport& accuracy,
                                   const UncertaintyReport& uncertainty) {
  std::filesystem::create_directories(dir);
  std::filesystem::path json_path = dir / "report.json";
  {
    std::ofstream out(json_path, std::ios::trunc);
    if (!out) throw Error(Errc::StoreUnavailable, "cannot write " + json_path.string());
    out << report_json(meta, accuracy, uncertainty).dump(2) << '\n';
  }
  {
    std::filesystem::path text_path = dir / "report.txt";
    std::ofstream out(text_path, std::ios::trunc);
    if (!out) throw Error(Errc::StoreUnavailable, "cannot write " + text_path.string());
    out << render_report_text(meta, accuracy, uncertainty);
  }
  return json_path;
}

}  // namespace farm
