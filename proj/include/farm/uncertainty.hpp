#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "farm/backend.hpp"
#include "farm/core.hpp"

namespace farm {

// Shannon entropy in nats over the returned alternatives, renormalized so
// their probabilities sum to 1 (the full vocabulary is not observable through
// completion APIs). Throws EmptyDistribution.
double first_token_entropy(const std::vector<TokenLogprob>& alternatives);

// exp(-(1/n) * sum of token logprobs). The count n may come from a tokenizer
// other than the backend's, so it is passed explicitly.
// Throws EmptySequence / NonPositiveCount.
double perplexity(const Completion& completion, int token_count);

// Pluggable token counter for the perplexity normalizer. The default counts
// the backend's own token list; a reference tokenizer can be swapped in to
// reproduce an external normalization.
using TokenCounter = std::function<int(const Completion&)>;

TokenCounter backend_token_counter();

// Crude whitespace word count, standing in for runs where an external
// reference tokenizer is configured out of reach.
TokenCounter whitespace_token_counter();

struct UncertaintyRecord {
  std::string scenario_id;
  double entropy_nats = 0.0;
  double perplexity = 1.0;
  int token_count = 1;
  bool correct = false;

  nlohmann::json to_json() const;
  static UncertaintyRecord from_json(const nlohmann::json& j);
};

struct UncertaintyCell {
  int count = 0;
  double mean_entropy = 0.0;
  double mean_perplexity = 0.0;
};

// Four cells in fixed order: safe-correct, safe-incorrect, unsafe-correct,
// unsafe-incorrect. A cell with no members is absent rather than zero.
struct UncertaintyReport {
  std::optional<UncertaintyCell> safe_correct;
  std::optional<UncertaintyCell> safe_incorrect;
  std::optional<UncertaintyCell> unsafe_correct;
  std::optional<UncertaintyCell> unsafe_incorrect;

  nlohmann::json to_json() const;
};

// Joins each record to its gold label by scenario id and averages per cell.
// Throws JoinFailure on an unknown scenario id.
UncertaintyReport aggregate(const std::vector<UncertaintyRecord>& records,
                            const std::map<std::string, Label>& gold_labels);

}  // namespace farm
