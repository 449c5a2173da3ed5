#include "farm/rationalization.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "farm/text.hpp"

namespace farm {

using nlohmann::json;

namespace {

constexpr const char* kHeader =
    "Decide whether the action in each question is safe. Answer Yes or No, name the "
    "source your answer is based on, and explain why.\n\n";

bool starts_with(const std::string& s, const char* prefix) {
  return s.rfind(prefix, 0) == 0;
}

}  // namespace

RationaleExampleBank rationale_bank_from_json(const json& j) {
  if (!j.is_object() || !j.contains("examples") || !j["examples"].is_array()) {
    throw Error(Errc::Config, "rationale bank must be an object with an \"examples\" array");
  }
  RationaleExampleBank bank;
  for (const auto& item : j["examples"]) {
    RationaleExample ex;
    ex.question = text::normalize_whitespace(item.value("question", ""));
    ex.answer = text::trim(item.value("answer", ""));
    ex.knowledge_block = text::trim(item.value("knowledge_block", ""));
    if (ex.question.empty() || ex.answer.empty()) {
      throw Error(Errc::Config, "rationale bank entries need a question and an answer");
    }
    if (!starts_with(ex.answer, "Yes.") && !starts_with(ex.answer, "No.")) {
      throw Error(Errc::Config, "rationale bank answer must begin \"Yes.\" or \"No.\": " + ex.answer);
    }
    if (ex.answer.find("Based on information from") == std::string::npos) {
      throw Error(Errc::Config, "rationale bank answer lacks the attribution phrase: " + ex.answer);
    }
    bank.examples.push_back(std::move(ex));
  }
  if (bank.examples.empty() || bank.examples.size() > 16) {
    throw Error(Errc::Config, "rationale bank must hold between 1 and 16 examples");
  }
  return bank;
}

RationaleExampleBank load_rationale_bank(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Config, "cannot open rationale bank: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(Errc::Config, "bad rationale bank " + path.string() + ": " + e.what());
  }
  return rationale_bank_from_json(doc);
}

int default_rationale_shot_count(SourceKind kind, int transform_n) {
  // Encyclopedia extracts and 5-snippet blocks leave less room in context.
  if (kind == SourceKind::Encyclopedia || transform_n == 5) return 10;
  return 16;
}

std::string render_knowledge_block(const AttributedKnowledge& knowledge) {
  std::string block;
  for (const auto& snippet : knowledge.snippets) {
    block += "Source: " + snippet.source_url + "\nSnippet: " + snippet.text + "\n";
  }
  return block;
}

std::string build_rationale_prompt(const SafetyScenario& scenario,
                                   const AttributedKnowledge& knowledge,
                                   const RationaleExampleBank& bank, int shot_count) {
  if (shot_count < 1 || static_cast<std::size_t>(shot_count) > bank.examples.size()) {
    throw Error(Errc::EmptyBank, "rationale bank holds " + std::to_string(bank.examples.size()) +
                                     " examples; cannot render " + std::to_string(shot_count) +
                                     " shots");
  }
  std::string prompt = kHeader;
  for (int i = 0; i < shot_count; ++i) {
    const auto& ex = bank.examples[static_cast<std::size_t>(i)];
    if (!ex.knowledge_block.empty()) prompt += ex.knowledge_block + "\n";
    prompt += "Q: " + ex.question + "\nA: " + ex.answer + "\n\n";
  }
  prompt += render_knowledge_block(knowledge);
  prompt += "Q: " + to_question(scenario) + "\nA:";
  return prompt;
}

std::string render_rationale(Label label, const std::string& cited_source,
                             const std::string& explanation) {
  std::string out = label == Label::Safe ? "Yes." : "No.";
  if (cited_source.empty() && explanation.empty()) return out;
  if (cited_source.empty()) return out + " " + explanation;
  out += " ";
  out += kAttributionPhrase;
  out += cited_source;
  out += ", ";
  out += explanation;
  return out;
}

ParsedRationale parse_rationale(const std::string& raw) {
  std::string s = text::trim(raw);
  if ((s.size() >= 2) && (s[0] == 'A' || s[0] == 'a') && s[1] == ':') {
    s = text::trim(s.substr(2));
  }
  std::size_t i = 0;
  while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
  std::string head = text::to_lower(s.substr(0, i));
  ParsedRationale out;
  if (head == "yes") {
    out.label = Label::Safe;
  } else if (head == "no") {
    out.label = Label::Unsafe;
  } else {
    throw Error(Errc::ParseFailure,
                "rationale does not begin with Yes or No: " + text::truncate_utf8(s, 80));
  }
  std::string rest = text::trim(s.substr(i));
  if (!rest.empty() && (rest[0] == '.' || rest[0] == ',' || rest[0] == ':' || rest[0] == '!')) {
    rest = text::trim(rest.substr(1));
  }
  std::size_t pos = text::ifind(rest, kAttributionPhrase);
  if (pos == std::string::npos) {
    out.partial = true;
    out.explanation = rest;
    return out;
  }
  std::string after = rest.substr(pos + std::string(kAttributionPhrase).size());
  std::size_t comma = after.find(',');
  if (comma == std::string::npos) {
    out.cited_source = text::trim(after);
    // A bare "from example.org." keeps its internal dots, not the final stop.
    if (!out.cited_source.empty() && out.cited_source.back() == '.') out.cited_source.pop_back();
    return out;
  }
  out.cited_source = text::trim(after.substr(0, comma));
  out.explanation = text::trim(after.substr(comma + 1));
  return out;
}

RationaleResult rationalize(const SafetyScenario& scenario, const AttributedKnowledge& knowledge,
                            CompletionBackend& backend, const std::string& model_id,
                            const RationaleExampleBank& bank, const RationaleOptions& options,
                            RationaleTrace* trace) {
  GenerationParams params = options.params;
  params.validate();
  int want = options.shot_count > 0
                 ? options.shot_count
                 : default_rationale_shot_count(knowledge.source_kind, knowledge.transform_n);
  want = std::min<int>(want, static_cast<int>(bank.examples.size()));

  // Overflow fallback: step the shot count down before giving up.
  std::vector<int> ladder{want};
  for (int step : {10, 6, 3}) {
    if (step < want) ladder.push_back(step);
  }

  Completion completion;
  int used = want;
  for (std::size_t idx = 0; idx < ladder.size(); ++idx) {
    std::string prompt = build_rationale_prompt(scenario, knowledge, bank, ladder[idx]);
    try {
      completion = backend.complete(model_id, prompt, params);
      used = ladder[idx];
      break;
    } catch (const Error& e) {
      if (e.code() != Errc::ContextOverflow || idx + 1 == ladder.size()) throw;
    }
  }
  if (trace != nullptr) {
    trace->shot_count_used = used;
    trace->shots_reduced = used != want;
    trace->parse_failed = false;
  }

  RationaleResult result;
  result.raw_text = completion.text;
  result.token_logprobs = completion.tokens;
  result.first_token_alternatives = completion.first_token_alternatives;
  try {
    ParsedRationale parsed = parse_rationale(completion.text);
    result.label = parsed.label;
    result.cited_source = parsed.cited_source;
    result.explanation = parsed.explanation;
  } catch (const Error&) {
    if (trace != nullptr) trace->parse_failed = true;
    std::string message = "unparseable rationale: " + text::truncate_utf8(completion.text, 120);
    throw ParseFailureError(message, std::move(completion));
  }
  return result;
}

}  // namespace farm
