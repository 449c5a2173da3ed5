#include "farm/core.hpp"

#include "farm/errors.hpp"
#include "farm/text.hpp"

namespace farm {

std::string label_name(Label label) { return label == Label::Safe ? "safe" : "unsafe"; }

Label label_from_string(const std::string& s) {
  const std::string lower = text::to_lower(text::trim(s));
  if (lower == "safe") return Label::Safe;
  if (lower == "unsafe") return Label::Unsafe;
  throw Error(Errc::BadLabel, "expected 'safe' or 'unsafe', got '" + s + "'");
}

std::string source_kind_name(SourceKind kind) {
  switch (kind) {
    case SourceKind::WebBase: return "web_base";
    case SourceKind::WebCredible: return "web_credible";
    case SourceKind::Encyclopedia: return "encyclopedia";
    case SourceKind::None: return "none";
  }
  return "none";
}

SourceKind source_kind_from_string(const std::string& s) {
  const std::string lower = text::to_lower(text::trim(s));
  if (lower == "web_base") return SourceKind::WebBase;
  if (lower == "web_credible") return SourceKind::WebCredible;
  if (lower == "encyclopedia") return SourceKind::Encyclopedia;
  if (lower == "none") return SourceKind::None;
  throw Error(Errc::Config, "unknown source kind '" + s + "'");
}

std::string to_question(const SafetyScenario& scenario) {
  const std::string prompt = text::trim(scenario.prompt);
  std::string action = text::trim(scenario.action);
  if (prompt.empty() || action.empty()) {
    throw Error(Errc::InvalidScenario, "scenario '" + scenario.id + "' has an empty prompt or action");
  }
  // Strip trailing '.', '!', ',' so the appended '?' is the only terminator.
  while (!action.empty()) {
    const char last = action.back();
    if (last == '.' || last == '!' || last == ',') {
      action.pop_back();
    } else {
      break;
    }
  }
  action = text::trim(action);
  if (action.empty()) {
    throw Error(Errc::InvalidScenario, "scenario '" + scenario.id + "' action is only punctuation");
  }
  std::string question = prompt + " should you " + action;
  if (question.back() != '?') question.push_back('?');
  return question;
}

SafetyScenario validate_scenario(const nlohmann::json& raw) {
  if (!raw.is_object()) throw Error(Errc::ParseError, "scenario record is not an object");

  auto required = [&raw](const char* field) -> std::string {
    if (!raw.contains(field)) throw Error(Errc::MissingField, std::string("missing '") + field + "'");
    const auto& value = raw.at(field);
    if (!value.is_string()) throw Error(Errc::MissingField, std::string("'") + field + "' is not a string");
    std::string normalized = text::normalize_whitespace(value.get<std::string>());
    if (normalized.empty()) throw Error(Errc::EmptyField, std::string("'") + field + "' is empty");
    return normalized;
  };

  SafetyScenario scenario;
  scenario.id = required("id");
  scenario.prompt = required("prompt");
  scenario.action = required("action");
  if (raw.contains("label") && !raw.at("label").is_null()) {
    if (!raw.at("label").is_string()) throw Error(Errc::BadLabel, "'label' is not a string");
    scenario.gold_label = label_from_string(raw.at("label").get<std::string>());
  }
  return scenario;
}

}  // namespace farm
