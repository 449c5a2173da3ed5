#include "farm/http_backend.hpp"

#include <httplib.h>

#include <algorithm>
#include <cstdlib>

#include "farm/errors.hpp"

namespace farm {

HttpBackend::HttpBackend(HttpBackendConfig config)
    : config_(std::move(config)),
      bucket_(config_.requests_per_second, std::max(1.0, config_.requests_per_second)),
      in_flight_(config_.max_in_flight),
      sleeper_(default_sleeper) {}

HttpBackend::~HttpBackend() = default;

int HttpBackend::context_budget(const std::string& model_id) const {
  auto it = config_.context_budgets.find(model_id);
  return it != config_.context_budgets.end() ? it->second : config_.default_context_budget;
}

std::string build_completion_request_body(const std::string& model_id, const std::string& prompt,
                                          const GenerationParams& params) {
  nlohmann::json body{
      {"model", model_id},
      {"prompt", prompt},
      {"max_tokens", params.max_tokens},
      {"temperature", params.temperature},
      {"top_p", params.top_p},
      {"presence_penalty", params.presence_penalty},
      {"frequency_penalty", params.frequency_penalty},
      {"logprobs", params.top_logprobs},
      {"echo", false},
  };
  if (!params.stop.empty()) body["stop"] = params.stop;
  return body.dump();
}

Completion parse_completion_response(const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedResponse, std::string("completion body is not JSON: ") + e.what());
  }
  try {
    if (!j.contains("choices") || !j.at("choices").is_array() || j.at("choices").empty()) {
      throw Error(Errc::MalformedResponse, "completion body has no choices");
    }
    const auto& choice = j.at("choices").at(0);
    Completion c;
    c.text = choice.value("text", "");
    c.model_id = j.value("model", "");
    c.finish_reason = finish_reason_from_string(choice.value("finish_reason", "stop"));
    if (choice.contains("logprobs") && choice.at("logprobs").is_object()) {
      const auto& lp = choice.at("logprobs");
      const auto& tokens = lp.value("tokens", nlohmann::json::array());
      const auto& token_lps = lp.value("token_logprobs", nlohmann::json::array());
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        const double value = (i < token_lps.size() && token_lps.at(i).is_number())
                                 ? token_lps.at(i).get<double>()
                                 : 0.0;
        c.tokens.push_back({tokens.at(i).get<std::string>(), value});
      }
      const auto& tops = lp.value("top_logprobs", nlohmann::json::array());
      if (!tops.empty() && tops.at(0).is_object()) {
        for (const auto& [token, value] : tops.at(0).items()) {
          c.first_token_alternatives.push_back({token, value.get<double>()});
        }
        // Most-likely first; ties broken by token for a stable order.
        std::sort(c.first_token_alternatives.begin(), c.first_token_alternatives.end(),
                  [](const TokenLogprob& a, const TokenLogprob& b) {
                    return a.logprob != b.logprob ? a.logprob > b.logprob : a.token < b.token;
                  });
      }
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedResponse, std::string("unexpected completion shape: ") + e.what());
  }
}

Completion HttpBackend::complete_once(const std::string& model_id, const std::string& prompt,
                                      const GenerationParams& params) {
  httplib::Client client(config_.base_url);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);

  httplib::Headers headers;
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw Error(Errc::Config, "environment variable '" + config_.api_key_env + "' is not set");
  }
  headers.emplace("Authorization", std::string("Bearer ") + key);

  bucket_.acquire();
  InFlightLimiter::Guard guard(in_flight_);

  auto result = client.Post(config_.completions_path, headers,
                            build_completion_request_body(model_id, prompt, params),
                            "application/json");
  if (!result) {
    throw Error(Errc::Transport, "request to " + config_.base_url + " failed: " +
                                     httplib::to_string(result.error()));
  }
  const int status = result->status;
  if (status == 429) throw Error(Errc::RateLimited, "status 429 from completion endpoint");
  if (status >= 500) throw Error(Errc::Transport, "status " + std::to_string(status));
  if (status != 200) {
    // Distinguish context overflow from other refusals when the body says so.
    std::string message = result->body;
    try {
      auto j = nlohmann::json::parse(result->body);
      if (j.contains("error") && j["error"].is_object()) {
        message = j["error"].value("message", message);
        const std::string code = j["error"].value("code", "");
        if (code == "context_length_exceeded" ||
            message.find("maximum context length") != std::string::npos) {
          throw Error(Errc::ContextOverflow, message);
        }
      }
    } catch (const nlohmann::json::exception&) {
    }
    throw Error(Errc::BackendRefusal, "status " + std::to_string(status) + ": " + message);
  }
  return parse_completion_response(result->body);
}

Completion HttpBackend::complete(const std::string& model_id, const std::string& prompt,
                                 const GenerationParams& params) {
  params.validate();
  if (prompt.empty()) throw Error(Errc::BackendRefusal, "empty prompt");
  ensure_within_budget(*this, model_id, prompt, params);
  return with_backoff(config_.backoff, sleeper_,
                      [&] { return complete_once(model_id, prompt, params); });
}

}  // namespace farm
