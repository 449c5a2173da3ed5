#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "farm/backend.hpp"
#include "farm/core.hpp"
#include "farm/errors.hpp"

namespace farm {

struct RationaleExample {
  std::string question;
  std::string knowledge_block;  // optional per-shot "Source:/Snippet:" lines
  std::string answer;           // "Yes./No. Based on information from ..."
};

// Few-shot examples demonstrating the answer template; at most 16, and kept
// disjoint from the evaluation scenarios.
struct RationaleExampleBank {
  std::vector<RationaleExample> examples;
};

// Bank file schema:
// {"examples": [{"question": ..., "knowledge_block": ..., "answer": ...}]}
// (knowledge_block optional). Every answer must begin "Yes." or "No." and
// contain the attribution phrase.
RationaleExampleBank load_rationale_bank(const std::filesystem::path& path);
RationaleExampleBank rationale_bank_from_json(const nlohmann::json& j);

inline constexpr const char* kAttributionPhrase = "Based on information from ";

// 16 by default; 10 when the knowledge source is the encyclopedia or the
// top-n transform keeps 5 snippets (longer knowledge blocks need the room).
int default_rationale_shot_count(SourceKind kind, int transform_n);

// "Source: {url}\nSnippet: {text}\n" per snippet in rank order; empty string
// for empty knowledge (the no-knowledge baseline).
std::string render_knowledge_block(const AttributedKnowledge& knowledge);

// Instruction header + shot_count example blocks + the scenario's knowledge
// block + "Q: {question}\nA:". Deterministic bytes.
std::string build_rationale_prompt(const SafetyScenario& scenario,
                                   const AttributedKnowledge& knowledge,
                                   const RationaleExampleBank& bank, int shot_count);

// Inverse of parse_rationale for well-formed inputs:
// "Yes./No. Based on information from {source}, {explanation}".
std::string render_rationale(Label label, const std::string& cited_source,
                             const std::string& explanation);

struct ParsedRationale {
  Label label = Label::Safe;
  std::string cited_source;
  std::string explanation;
  bool partial = false;  // label found but the attribution phrase is absent
};

// Reads the leading Yes/No (after an optional "A:"), then the cited source up
// to the first comma after the attribution phrase, then the explanation.
// Throws ParseFailure when neither yes nor no leads.
ParsedRationale parse_rationale(const std::string& raw);

// ParseFailure variant carrying the raw completion so callers can keep the
// text and flag the sample instead of losing the generation.
class ParseFailureError : public Error {
 public:
  ParseFailureError(const std::string& message, Completion completion)
      : Error(Errc::ParseFailure, message), completion_(std::move(completion)) {}

  const Completion& completion() const { return completion_; }

 private:
  Completion completion_;
};

struct RationaleOptions {
  int shot_count = 0;  // 0: derive from source kind and transform_n
  GenerationParams params;
};

// How the rationale generation actually ran: shots used after any overflow
// reduction, and whether the parse succeeded.
struct RationaleTrace {
  int shot_count_used = 0;
  bool shots_reduced = false;
  bool parse_failed = false;
};

// Builds the prompt, generates greedily, and parses the answer. On a context
// overflow the shot count steps down 16 -> 10 -> 6 -> 3 before giving up.
// Throws ParseFailureError on unparseable output; backend errors propagate.
RationaleResult rationalize(const SafetyScenario& scenario, const AttributedKnowledge& knowledge,
                            CompletionBackend& backend, const std::string& model_id,
                            const RationaleExampleBank& bank, const RationaleOptions& options,
                            RationaleTrace* trace = nullptr);

}  // namespace farm
