#pragma once

#include <optional>
#include <string>
#include <vector>

#include "farm/backend.hpp"
#include "farm/core.hpp"
#include "farm/errors.hpp"
#include "farm/foveation.hpp"

namespace farm {

struct RetrieverConfig {
  SourceKind source_kind = SourceKind::WebCredible;
  int transform_n = 3;           // one of {1, 3, 5}
  int result_page_size = 10;     // raw results requested before filtering
  int snippet_char_budget = 400;  // snippet text truncated past this many bytes

  void validate() const;
};

// Common contract over the search services. Implementations return snippets
// in service rank order (ranks 1..m) and may legitimately return nothing.
class Retriever {
 public:
  virtual ~Retriever() = default;

  // Throws Transport/RateLimited (retryable upstream) or MalformedResponse.
  virtual std::vector<KnowledgeSnippet> search(const std::string& query, int page_size) = 0;
};

// Host portion of a URL or bare domain, lowercased; nullopt when unparseable.
std::optional<std::string> host_of(const std::string& url);

// True when the registrable domain's final label is org/edu/gov, including
// two-label country variants such as gov.uk and edu.au.
bool is_credible_url(const std::string& url);

// Keeps credible-host snippets, re-ranked densely from 1 in original order.
// Unparseable source URLs are dropped.
std::vector<KnowledgeSnippet> filter_credible(const std::vector<KnowledgeSnippet>& snippets);

// First min(n, |snippets|) snippets by rank; n must be 1, 3, or 5.
AttributedKnowledge top_n(const std::vector<KnowledgeSnippet>& snippets, int n,
                          SourceKind kind = SourceKind::None);

struct Attribution {
  Foveation foveation;
  AttributedKnowledge knowledge;
};

// RetryExhausted variant that carries every foveation tried, so callers can
// record them before falling back to the no-knowledge baseline.
class RetryExhaustedError : public Error {
 public:
  RetryExhaustedError(const std::string& message, std::vector<Foveation> tried)
      : Error(Errc::RetryExhausted, message), tried_(std::move(tried)) {}

  const std::vector<Foveation>& tried() const { return tried_; }

 private:
  std::vector<Foveation> tried_;
};

// Foveate, query, filter (for the credible source), transform; regenerate the
// foveation while retrieval comes back empty. Throws RetryExhaustedError once
// options.max_attempts foveations have all failed to retrieve.
Attribution attribute(const SafetyScenario& scenario, CompletionBackend& backend,
                      const std::string& model_id, const FoveationExampleBank& bank,
                      const FoveationOptions& fov_options, Retriever& retriever,
                      const RetrieverConfig& config);

}  // namespace farm
