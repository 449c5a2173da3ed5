#include "farm/backend.hpp"

#include "farm/errors.hpp"

namespace farm {

void GenerationParams::validate() const {
  if (max_tokens < 1) throw Error(Errc::Config, "max_tokens must be >= 1");
  if (temperature < 0.0) throw Error(Errc::Config, "temperature must be >= 0");
  if (top_p <= 0.0 || top_p > 1.0) throw Error(Errc::Config, "top_p must be in (0, 1]");
  if (presence_penalty < -2.0 || presence_penalty > 2.0) {
    throw Error(Errc::Config, "presence_penalty must be in [-2, 2]");
  }
  if (frequency_penalty < -2.0 || frequency_penalty > 2.0) {
    throw Error(Errc::Config, "frequency_penalty must be in [-2, 2]");
  }
  if (stop.size() > 4) throw Error(Errc::Config, "at most 4 stop sequences");
  if (top_logprobs < 0) throw Error(Errc::Config, "top_logprobs must be >= 0");
}

nlohmann::json GenerationParams::to_json() const {
  return nlohmann::json{
      {"max_tokens", max_tokens},
      {"temperature", temperature},
      {"top_p", top_p},
      {"presence_penalty", presence_penalty},
      {"frequency_penalty", frequency_penalty},
      {"stop", stop},
      {"top_logprobs", top_logprobs},
  };
}

GenerationParams GenerationParams::from_json(const nlohmann::json& j) {
  GenerationParams p;
  p.max_tokens = j.value("max_tokens", p.max_tokens);
  p.temperature = j.value("temperature", p.temperature);
  p.top_p = j.value("top_p", p.top_p);
  p.presence_penalty = j.value("presence_penalty", p.presence_penalty);
  p.frequency_penalty = j.value("frequency_penalty", p.frequency_penalty);
  if (j.contains("stop")) p.stop = j.at("stop").get<std::vector<std::string>>();
  p.top_logprobs = j.value("top_logprobs", p.top_logprobs);
  return p;
}

GenerationParams creative_retry_profile(GenerationParams params) {
  params.temperature = 1.0;
  params.presence_penalty = 2.0;
  params.frequency_penalty = 2.0;
  return params;
}

std::string finish_reason_name(FinishReason reason) {
  switch (reason) {
    case FinishReason::Stop: return "stop";
    case FinishReason::Length: return "length";
    case FinishReason::Other: return "other";
  }
  return "other";
}

FinishReason finish_reason_from_string(const std::string& s) {
  if (s == "stop") return FinishReason::Stop;
  if (s == "length") return FinishReason::Length;
  return FinishReason::Other;
}

namespace {
nlohmann::json token_list_json(const std::vector<TokenLogprob>& tokens) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : tokens) out.push_back({{"token", t.token}, {"logprob", t.logprob}});
  return out;
}

std::vector<TokenLogprob> token_list_from_json(const nlohmann::json& j) {
  std::vector<TokenLogprob> out;
  for (const auto& item : j) {
    out.push_back({item.at("token").get<std::string>(), item.at("logprob").get<double>()});
  }
  return out;
}
}  // namespace

nlohmann::json Completion::to_json() const {
  return nlohmann::json{
      {"text", text},
      {"tokens", token_list_json(tokens)},
      {"first_token_alternatives", token_list_json(first_token_alternatives)},
      {"model_id", model_id},
      {"finish_reason", finish_reason_name(finish_reason)},
  };
}

Completion Completion::from_json(const nlohmann::json& j) {
  Completion c;
  c.text = j.at("text").get<std::string>();
  c.tokens = token_list_from_json(j.at("tokens"));
  if (j.contains("first_token_alternatives")) {
    c.first_token_alternatives = token_list_from_json(j.at("first_token_alternatives"));
  }
  c.model_id = j.value("model_id", "");
  c.finish_reason = finish_reason_from_string(j.value("finish_reason", "stop"));
  return c;
}

double sequence_log_likelihood(const Completion& completion) {
  if (completion.tokens.empty()) {
    throw Error(Errc::EmptySequence, "completion has no tokens");
  }
  double sum = 0.0;
  for (const auto& t : completion.tokens) sum += t.logprob;
  return sum;
}

int estimate_tokens(const std::string& prompt) {
  // ~4 characters per token; good enough for a conservative budget check.
  return static_cast<int>((prompt.size() + 3) / 4);
}

void ensure_within_budget(const CompletionBackend& backend, const std::string& model_id,
                          const std::string& prompt, const GenerationParams& params) {
  const int budget = backend.context_budget(model_id);
  const int needed = estimate_tokens(prompt) + params.max_tokens;
  if (needed > budget) {
    throw Error(Errc::ContextOverflow, "estimated " + std::to_string(needed) + " tokens for model '" +
                                           model_id + "' (budget " + std::to_string(budget) + ")");
  }
}

}  // namespace farm
