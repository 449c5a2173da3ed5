#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "farm/core.hpp"

namespace farm {

// Decoding parameters for a completion call. Defaults are the greedy profile
// used for both generation stages.
struct GenerationParams {
  int max_tokens = 128;
  double temperature = 0.0;
  double top_p = 1.0;
  double presence_penalty = 0.0;
  double frequency_penalty = 0.0;
  std::vector<std::string> stop;  // at most 4 entries
  int top_logprobs = 5;           // alternatives requested per position

  // Throws Config when a field is out of range.
  void validate() const;

  nlohmann::json to_json() const;
  static GenerationParams from_json(const nlohmann::json& j);
};

// Creative retry profile: temperature 1, both penalties 2, rest unchanged.
GenerationParams creative_retry_profile(GenerationParams params);

enum class FinishReason { Stop, Length, Other };

std::string finish_reason_name(FinishReason reason);
FinishReason finish_reason_from_string(const std::string& s);

struct Completion {
  std::string text;  // concatenation of tokens
  std::vector<TokenLogprob> tokens;
  std::vector<TokenLogprob> first_token_alternatives;
  std::string model_id;
  FinishReason finish_reason = FinishReason::Stop;

  nlohmann::json to_json() const;
  static Completion from_json(const nlohmann::json& j);
};

// Sum of token log-probs (the joint sequence log-likelihood).
// Throws EmptySequence when the completion has no tokens.
double sequence_log_likelihood(const Completion& completion);

// Crude prompt-size estimate used for the context budget pre-check.
int estimate_tokens(const std::string& prompt);

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;

  // Generates a completion. Throws Transport, RateLimited, ContextOverflow,
  // or BackendRefusal.
  virtual Completion complete(const std::string& model_id, const std::string& prompt,
                              const GenerationParams& params) = 0;

  // Total token budget (prompt + generation) for the given model.
  virtual int context_budget(const std::string& model_id) const = 0;
};

// Shared pre-check: throws ContextOverflow when the estimated prompt size plus
// max_tokens exceeds the model's budget.
void ensure_within_budget(const CompletionBackend& backend, const std::string& model_id,
                          const std::string& prompt, const GenerationParams& params);

}  // namespace farm
