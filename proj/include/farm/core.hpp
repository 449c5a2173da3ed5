#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace farm {

enum class Label { Safe, Unsafe };

std::string label_name(Label label);
// Accepts "safe"/"unsafe" case-insensitively; throws BadLabel otherwise.
Label label_from_string(const std::string& s);

// A situation/action pair, optionally carrying a gold safety label.
struct SafetyScenario {
  std::string id;
  std::string prompt;   // situation text, e.g. "If your soda has gone flat,"
  std::string action;   // advice text, e.g. "add a bit of hydrogen peroxide"
  std::optional<Label> gold_label;
};

// A short generated query naming the knowledge a scenario requires.
struct Foveation {
  std::string text;
  double log_likelihood = 0.0;  // sum of token log-probs, <= 0
  int attempt = 1;              // 1 = greedy, >1 = imaginative retry
};

// One ranked search result excerpt with its source URL.
struct KnowledgeSnippet {
  std::string text;
  std::string source_url;
  int rank = 1;  // retriever-assigned relevance order, 1-based
};

enum class SourceKind { WebBase, WebCredible, Encyclopedia, None };

std::string source_kind_name(SourceKind kind);
SourceKind source_kind_from_string(const std::string& s);

// Retrieved knowledge after the top-n transform. An empty snippet list with
// kind None is the no-knowledge baseline.
struct AttributedKnowledge {
  std::vector<KnowledgeSnippet> snippets;  // rank order preserved, size <= transform_n
  int transform_n = 3;                     // one of {1, 3, 5}
  SourceKind source_kind = SourceKind::None;

  bool empty() const { return snippets.empty(); }
};

struct TokenLogprob {
  std::string token;
  double logprob = 0.0;
};

// Parsed rationale generation: classification, cited source, explanation,
// plus the raw text and token-level log-probabilities behind them.
struct RationaleResult {
  Label label = Label::Safe;
  std::string cited_source;
  std::string explanation;
  std::string raw_text;
  std::vector<TokenLogprob> token_logprobs;
  std::vector<TokenLogprob> first_token_alternatives;
};

// "{prompt} should you {action}?" with trailing '.', '!', ',' stripped from
// the action before the question mark is appended.
std::string to_question(const SafetyScenario& scenario);

// Validates a parsed dataset record; normalizes whitespace in text fields.
// Throws MissingField / EmptyField / BadLabel.
SafetyScenario validate_scenario(const nlohmann::json& raw);

}  // namespace farm
