#include <fstream>

#include <json.hpp>

#include "farm/canonical.hpp"
#include "farm/errors.hpp"
#include "farm/retrievers.hpp"

namespace farm {

using nlohmann::json;

json snippets_to_json(const std::vector<KnowledgeSnippet>& snippets) {
  json arr = json::array();
  for (const auto& s : snippets) {
    arr.push_back({{"text", s.text}, {"source_url", s.source_url}, {"rank", s.rank}});
  }
  return arr;
}

std::vector<KnowledgeSnippet> snippets_from_json(const json& j) {
  if (!j.is_array()) throw Error(Errc::MalformedResponse, "snippet list must be an array");
  std::vector<KnowledgeSnippet> out;
  out.reserve(j.size());
  for (const auto& item : j) {
    KnowledgeSnippet s;
    s.text = item.at("text").get<std::string>();
    s.source_url = item.at("source_url").get<std::string>();
    s.rank = item.at("rank").get<int>();
    out.push_back(std::move(s));
  }
  return out;
}

std::string retrieval_service_name(SourceKind kind) {
  switch (kind) {
    case SourceKind::Encyclopedia:
      return "wiki";
    case SourceKind::WebBase:
    case SourceKind::WebCredible:
      return "web";
    case SourceKind::None:
      break;
  }
  throw Error(Errc::Config, "source kind has no retrieval service");
}

FixtureRetriever::FixtureRetriever(std::string service) : service_(std::move(service)) {}

FixtureRetriever::FixtureRetriever(std::string service, const std::filesystem::path& fixture_dir)
    : service_(std::move(service)) {
  namespace fs = std::filesystem;
  if (!fs::exists(fixture_dir)) {
    throw Error(Errc::StoreUnavailable, "fixture directory not found: " + fixture_dir.string());
  }
  for (const auto& entry : fs::recursive_directory_iterator(fixture_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    json doc;
    try {
      in >> doc;
    } catch (const json::exception& e) {
      throw Error(Errc::ParseFailure,
                  "bad retrieval fixture " + entry.path().string() + ": " + e.what());
    }
    if (!doc.contains("request") || !doc.contains("results")) continue;
    const json& req = doc["request"];
    if (req.value("service", "") != service_) continue;
    std::string digest =
        retrieval_request_digest(service_, req.at("query").get<std::string>(),
                                 req.at("page_size").get<int>());
    scripts_[digest] = snippets_from_json(doc["results"]);
  }
}

void FixtureRetriever::script(const std::string& query, std::vector<KnowledgeSnippet> results) {
  // Page size participates in the digest; script under the sizes callers use.
  std::lock_guard<std::mutex> lock(mutex_);
  for (int page_size : {1, 3, 5, 10, 20}) {
    scripts_[retrieval_request_digest(service_, query, page_size)] = results;
  }
}

std::vector<KnowledgeSnippet> FixtureRetriever::search(const std::string& query, int page_size) {
  std::string digest = retrieval_request_digest(service_, query, page_size);
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = scripts_.find(digest);
  if (it == scripts_.end()) {
    throw Error(Errc::Transport, "no scripted results for " + service_ + " query: " + query);
  }
  return it->second;
}

std::filesystem::path FixtureRetriever::write_fixture(const std::filesystem::path& dir,
                                                      const std::string& service,
                                                      const std::string& query,
                                                      const std::vector<KnowledgeSnippet>& results) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  // One file per (query, page_size) pair would bloat test data; register the
  // common sizes in a single file list by writing one file per size.
  fs::path last;
  for (int page_size : {1, 3, 5, 10, 20}) {
    std::string digest = retrieval_request_digest(service, query, page_size);
    json doc = {{"request", {{"service", service}, {"query", query}, {"page_size", page_size}}},
                {"results", snippets_to_json(results)}};
    fs::path path = dir / (digest + ".json");
    std::ofstream out(path);
    out << doc.dump(2) << '\n';
    last = path;
  }
  return last;
}

std::vector<KnowledgeSnippet> CachingRetriever::search(const std::string& query, int page_size) {
  if (cache_ == nullptr) return inner_.search(query, page_size);
  CacheKey key{CacheNamespace::Retrieval, retrieval_request_digest(service_, query, page_size)};
  if (auto hit = cache_->get(key)) {
    try {
      return snippets_from_json(json::parse(*hit));
    } catch (const std::exception&) {
      // Fall through to a fresh search on a corrupt payload.
    }
  }
  auto results = inner_.search(query, page_size);
  cache_->put(key, snippets_to_json(results).dump());
  return results;
}

}  // namespace farm
