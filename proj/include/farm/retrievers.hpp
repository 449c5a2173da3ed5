#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "farm/attribution.hpp"
#include "farm/cache.hpp"
#include "farm/rate_limit.hpp"
#include "farm/retry.hpp"

namespace farm {

// Canned retriever for tests and offline runs. Scripts live in memory or as
// "<digest>.json" files keyed by the retrieval-request digest.
class FixtureRetriever : public Retriever {
 public:
  // service tags queries so web and encyclopedia fixtures do not collide.
  explicit FixtureRetriever(std::string service);
  FixtureRetriever(std::string service, const std::filesystem::path& fixture_dir);

  void script(const std::string& query, std::vector<KnowledgeSnippet> results);

  std::vector<KnowledgeSnippet> search(const std::string& query, int page_size) override;

  // Writes a script file readable by the fixture-directory constructor.
  static std::filesystem::path write_fixture(const std::filesystem::path& dir,
                                             const std::string& service, const std::string& query,
                                             const std::vector<KnowledgeSnippet>& results);

 private:
  std::string service_;
  std::mutex mutex_;
  std::map<std::string, std::vector<KnowledgeSnippet>> scripts_;  // digest -> results
};

struct WikipediaConfig {
  std::string base_url = "https://en.wikipedia.org";
  std::string api_path = "/w/api.php";
  int timeout_seconds = 30;
  BackoffPolicy backoff;
  double requests_per_second = 2.0;
};

// MediaWiki search client; takes each result's snippet text and links the
// article page as the source URL.
class WikipediaRetriever : public Retriever {
 public:
  explicit WikipediaRetriever(WikipediaConfig config);

  std::vector<KnowledgeSnippet> search(const std::string& query, int page_size) override;

  void set_sleeper(Sleeper sleeper) { sleeper_ = std::move(sleeper); }

 private:
  WikipediaConfig config_;
  TokenBucket bucket_;
  Sleeper sleeper_ = default_sleeper;
};

// Parses a MediaWiki list=search response body into ranked snippets.
std::vector<KnowledgeSnippet> parse_wikipedia_response(const std::string& body,
                                                       const std::string& base_url);

struct WebSearchConfig {
  std::string base_url = "https://serpapi.com";
  std::string api_path = "/search";
  std::string engine = "google";
  std::string api_key_env = "SERPAPI_KEY";
  int timeout_seconds = 30;
  BackoffPolicy backoff;
  double requests_per_second = 1.0;
};

// SERP-style web search client; takes each organic result's snippet and link.
class WebSearchRetriever : public Retriever {
 public:
  explicit WebSearchRetriever(WebSearchConfig config);

  std::vector<KnowledgeSnippet> search(const std::string& query, int page_size) override;

  void set_sleeper(Sleeper sleeper) { sleeper_ = std::move(sleeper); }

 private:
  WebSearchConfig config_;
  TokenBucket bucket_;
  Sleeper sleeper_ = default_sleeper;
};

// Parses a SERP response body ("organic_results") into ranked snippets.
std::vector<KnowledgeSnippet> parse_web_search_response(const std::string& body);

// Cache decorator storing parsed snippet lists under the Retrieval namespace.
class CachingRetriever : public Retriever {
 public:
  CachingRetriever(Retriever& inner, std::string service, FileCache* cache)
      : inner_(inner), service_(std::move(service)), cache_(cache) {}

  std::vector<KnowledgeSnippet> search(const std::string& query, int page_size) override;

 private:
  Retriever& inner_;
  std::string service_;
  FileCache* cache_;
};

nlohmann::json snippets_to_json(const std::vector<KnowledgeSnippet>& snippets);
std::vector<KnowledgeSnippet> snippets_from_json(const nlohmann::json& j);

// Service tag used in retrieval digests for a source kind ("web" or "wiki").
std::string retrieval_service_name(SourceKind kind);

std::string url_encode(const std::string& value);

}  // namespace farm
