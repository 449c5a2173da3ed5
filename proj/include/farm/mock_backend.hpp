#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "farm/backend.hpp"

namespace farm {

// Deterministic scripted backend keyed by the digest of (model_id, prompt,
// params). A key scripted with a single completion always returns that
// completion, so temperature-0 runs are byte-reproducible. A key scripted
// with a sequence hands out entries in order (last one sticky), which models
// sampling-profile calls that legitimately vary between requests.
class MockBackend : public CompletionBackend {
 public:
  MockBackend() = default;

  // Loads every "<digest>.json" script in the directory (recursively).
  explicit MockBackend(const std::filesystem::path& fixture_dir);

  void script(const std::string& model_id, const std::string& prompt,
              const GenerationParams& params, Completion response);

  void script_sequence(const std::string& model_id, const std::string& prompt,
                       const GenerationParams& params, std::vector<Completion> responses);

  Completion complete(const std::string& model_id, const std::string& prompt,
                      const GenerationParams& params) override;

  int context_budget(const std::string& model_id) const override;
  void set_context_budget(const std::string& model_id, int tokens);

  struct Request {
    std::string model_id;
    std::string prompt;
    GenerationParams params;
  };

  // Every complete() call in arrival order, for test assertions.
  std::vector<Request> requests() const;
  void clear_requests();

  // Writes a "<digest>.json" script file the fixture-directory constructor
  // understands. The request fields are embedded for human inspection.
  static std::filesystem::path write_fixture(const std::filesystem::path& dir,
                                             const std::string& model_id, const std::string& prompt,
                                             const GenerationParams& params,
                                             const std::vector<Completion>& responses);

  // Convenience: a completion whose tokens are the whitespace-split pieces of
  // text, each with the given logprob, plus first-token alternatives.
  static Completion make_completion(const std::string& text, double per_token_logprob = -0.05,
                                    std::vector<TokenLogprob> first_token_alternatives = {});

 private:
  struct Script {
    std::vector<Completion> responses;
    std::size_t next = 0;
  };

  mutable std::mutex mutex_;
  std::map<std::string, Script> scripts_;          // digest -> responses
  std::map<std::string, int> context_budgets_;     // model_id -> tokens
  std::vector<Request> requests_;
  int default_context_budget_ = 1 << 20;
};

}  // namespace farm
