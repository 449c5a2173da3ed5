#pragma once

#include <map>
#include <memory>
#include <string>

#include "farm/backend.hpp"
#include "farm/rate_limit.hpp"
#include "farm/retry.hpp"

namespace farm {

struct HttpBackendConfig {
  std::string base_url = "https://api.openai.com";
  std::string completions_path = "/v1/completions";
  std::string api_key_env = "OPENAI_API_KEY";  // name of the env var holding the key
  int timeout_seconds = 120;
  BackoffPolicy backoff;            // applied to Transport/RateLimited only
  int max_in_flight = 4;
  double requests_per_second = 1.0;
  int default_context_budget = 4000;
  std::map<std::string, int> context_budgets;  // per-model overrides
};

// Completion-style HTTP client. Request/response bodies are JSON in the shape
// used by completion endpoints that return per-token log-probabilities.
class HttpBackend : public CompletionBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  ~HttpBackend() override;

  Completion complete(const std::string& model_id, const std::string& prompt,
                      const GenerationParams& params) override;

  int context_budget(const std::string& model_id) const override;

  // Exposed for tests; replaces the blocking sleep between retries.
  void set_sleeper(Sleeper sleeper) { sleeper_ = std::move(sleeper); }

 private:
  Completion complete_once(const std::string& model_id, const std::string& prompt,
                           const GenerationParams& params);

  HttpBackendConfig config_;
  TokenBucket bucket_;
  InFlightLimiter in_flight_;
  Sleeper sleeper_;
};

// Builds the JSON request body for a completion call.
std::string build_completion_request_body(const std::string& model_id, const std::string& prompt,
                                          const GenerationParams& params);

// Parses a completion response body; throws MalformedResponse on shape errors.
Completion parse_completion_response(const std::string& body);

}  // namespace farm
