#include "farm/annotations.hpp"

#include <fstream>

#include "farm/errors.hpp"
#include "farm/text.hpp"

namespace farm {

namespace {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

const std::vector<std::string>& header_for(AnnotationKind kind) {
  static const std::vector<std::string> foveation = {"scenario_id", "question", "foveation",
                                                     "attempt", "rating"};
  static const std::vector<std::string> rationale = {
      "scenario_id",    "question",         "gold_label",
      "predicted_label", "cited_source",    "rationale",
      "factuality_error", "entailment_error", "attribution_error"};
  return kind == AnnotationKind::FoveationRating ? foveation : rationale;
}

bool flag_set(const std::string& cell) {
  std::string v = text::to_lower(text::trim(cell));
  if (v.empty() || v == "0" || v == "no" || v == "false") return false;
  if (v == "1" || v == "x" || v == "yes" || v == "true") return true;
  throw Error(Errc::ParseError, "unreadable annotation flag: " + cell);
}

}  // namespace

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string csv_join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += csv_escape(fields[i]);
  }
  return out;
}

std::filesystem::path export_annotations(const std::vector<FarmOutcome>& outcomes,
                                         const std::vector<SafetyScenario>& dataset,
                                         AnnotationKind kind, const std::filesystem::path& path) {
  std::map<std::string, const SafetyScenario*> by_id;
  for (const auto& s : dataset) by_id[s.id] = &s;
  auto question_for = [&by_id](const std::string& id) -> std::string {
    auto it = by_id.find(id);
    return it == by_id.end() ? std::string() : to_question(*it->second);
  };

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::StoreUnavailable, "cannot write " + path.string());
  out << csv_join(header_for(kind)) << '\n';

  for (const auto& o : outcomes) {
    if (kind == AnnotationKind::FoveationRating) {
      if (o.foveations.empty()) continue;
      const Foveation& f = o.foveations.back();  // the foveation the run used
      out << csv_join({o.scenario_id, question_for(o.scenario_id), f.text,
                       std::to_string(f.attempt), ""})
          << '\n';
    } else {
      if (!o.rationale) continue;
      auto it = by_id.find(o.scenario_id);
      std::string gold = it != by_id.end() && it->second->gold_label
                             ? label_name(*it->second->gold_label)
                             : "";
      std::string predicted = o.predicted() ? label_name(*o.predicted()) : "";
      out << csv_join({o.scenario_id, question_for(o.scenario_id), gold, predicted,
                       o.rationale->cited_source, o.rationale->raw_text, "", "", ""})
          << '\n';
    }
  }
  return path;
}

double RatingDistribution::percent(const std::string& category) const {
  if (rated == 0) return 0.0;
  auto it = counts.find(category);
  return it == counts.end() ? 0.0 : 100.0 * it->second / rated;
}

RatingDistribution import_annotations(const std::filesystem::path& path, AnnotationKind kind) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Config, "cannot open annotation file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::ParseError, "annotation file is empty");
  const auto& header = header_for(kind);
  if (csv_split(line) != header) {
    throw Error(Errc::ParseError, "annotation header does not match: " + line);
  }

  RatingDistribution dist;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (text::trim(line).empty()) continue;
    auto fields = csv_split(line);
    if (fields.size() != header.size()) {
      throw Error(Errc::ParseError, "annotation line " + std::to_string(line_number) + " has " +
                                        std::to_string(fields.size()) + " fields, expected " +
                                        std::to_string(header.size()));
    }
    ++dist.total_rows;
    if (kind == AnnotationKind::FoveationRating) {
      std::string rating = text::trim(fields.back());
      if (rating.empty()) continue;
      std::string upper;
      for (char c : rating) upper.push_back(static_cast<char>(std::toupper((unsigned char)c)));
      if (upper != "SE" && upper != "GE" && upper != "CF") {
        throw Error(Errc::ParseError, "annotation line " + std::to_string(line_number) +
                                          ": rating must be SE, GE, or CF, got " + rating);
      }
      ++dist.rated;
      ++dist.counts[upper];
    } else {
      // The last three columns are the error flags; an all-blank row is unrated.
      bool any = false;
      const char* names[3] = {"factuality_error", "entailment_error", "attribution_error"};
      bool set[3];
      for (int i = 0; i < 3; ++i) {
        const std::string& cell = fields[fields.size() - 3 + static_cast<std::size_t>(i)];
        any = any || !text::trim(cell).empty();
        set[i] = flag_set(cell);
      }
      if (!any) continue;
      ++dist.rated;
      for (int i = 0; i < 3; ++i) {
        if (set[i]) ++dist.counts[names[i]];
      }
    }
  }
  return dist;
}

}  // namespace farm
