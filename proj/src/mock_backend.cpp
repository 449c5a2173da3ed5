#include "farm/mock_backend.hpp"

#include <fstream>

#include "farm/canonical.hpp"
#include "farm/errors.hpp"

namespace farm {

MockBackend::MockBackend(const std::filesystem::path& fixture_dir) {
  if (!std::filesystem::is_directory(fixture_dir)) {
    throw Error(Errc::Config, "mock fixture directory '" + fixture_dir.string() + "' not found");
  }
  for (const auto& entry : std::filesystem::recursive_directory_iterator(fixture_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::Config, "bad mock script '" + entry.path().string() + "': " + e.what());
    }
    Script script;
    for (const auto& r : j.at("responses")) script.responses.push_back(Completion::from_json(r));
    if (script.responses.empty()) {
      throw Error(Errc::Config, "mock script '" + entry.path().string() + "' has no responses");
    }
    scripts_[entry.path().stem().string()] = std::move(script);
  }
}

void MockBackend::script(const std::string& model_id, const std::string& prompt,
                         const GenerationParams& params, Completion response) {
  script_sequence(model_id, prompt, params, {std::move(response)});
}

void MockBackend::script_sequence(const std::string& model_id, const std::string& prompt,
                                  const GenerationParams& params,
                                  std::vector<Completion> responses) {
  const std::string digest = completion_request_digest(model_id, prompt, params);
  std::lock_guard<std::mutex> lock(mutex_);
  scripts_[digest] = Script{std::move(responses), 0};
}

Completion MockBackend::complete(const std::string& model_id, const std::string& prompt,
                                 const GenerationParams& params) {
  params.validate();
  if (prompt.empty()) throw Error(Errc::BackendRefusal, "empty prompt");
  ensure_within_budget(*this, model_id, prompt, params);
  const std::string digest = completion_request_digest(model_id, prompt, params);

  std::lock_guard<std::mutex> lock(mutex_);
  requests_.push_back({model_id, prompt, params});
  auto it = scripts_.find(digest);
  if (it == scripts_.end()) {
    throw Error(Errc::BackendRefusal,
                "no scripted response for request digest " + digest.substr(0, 12));
  }
  Script& s = it->second;
  const Completion& response = s.responses[std::min(s.next, s.responses.size() - 1)];
  if (s.next + 1 < s.responses.size()) ++s.next;
  Completion out = response;
  if (out.model_id.empty()) out.model_id = model_id;
  return out;
}

int MockBackend::context_budget(const std::string& model_id) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = context_budgets_.find(model_id);
  return it != context_budgets_.end() ? it->second : default_context_budget_;
}

void MockBackend::set_context_budget(const std::string& model_id, int tokens) {
  std::lock_guard<std::mutex> lock(mutex_);
  context_budgets_[model_id] = tokens;
}

std::vector<MockBackend::Request> MockBackend::requests() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return requests_;
}

void MockBackend::clear_requests() {
  std::lock_guard<std::mutex> lock(mutex_);
  requests_.clear();
}

std::filesystem::path MockBackend::write_fixture(const std::filesystem::path& dir,
                                                 const std::string& model_id,
                                                 const std::string& prompt,
                                                 const GenerationParams& params,
                                                 const std::vector<Completion>& responses) {
  std::filesystem::create_directories(dir);
  const std::string digest = completion_request_digest(model_id, prompt, params);
  nlohmann::json j{
      {"request", {{"model_id", model_id}, {"prompt", prompt}, {"params", params.to_json()}}},
      {"responses", nlohmann::json::array()},
  };
  for (const auto& r : responses) j["responses"].push_back(r.to_json());
  const auto path = dir / (digest + ".json");
  std::ofstream out(path, std::ios::trunc);
  out << j.dump(2) << '\n';
  return path;
}

Completion MockBackend::make_completion(const std::string& text, double per_token_logprob,
                                        std::vector<TokenLogprob> first_token_alternatives) {
  Completion c;
  c.text = text;
  // Split into word tokens that keep their leading whitespace so the token
  // concatenation reproduces the text exactly.
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = start;
    while (end < text.size() && (text[end] == ' ' || text[end] == '\n')) ++end;
    while (end < text.size() && text[end] != ' ' && text[end] != '\n') ++end;
    c.tokens.push_back({text.substr(start, end - start), per_token_logprob});
    start = end;
  }
  if (first_token_alternatives.empty() && !c.tokens.empty()) {
    first_token_alternatives = {{c.tokens.front().token, per_token_logprob},
                                {" maybe", -4.0},
                                {" unknown", -6.0}};
  }
  c.first_token_alternatives = std::move(first_token_alternatives);
  c.finish_reason = FinishReason::Stop;
  return c;
}

}  // namespace farm
