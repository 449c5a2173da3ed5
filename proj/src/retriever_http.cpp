#include <cstdio>
#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "farm/errors.hpp"
#include "farm/retrievers.hpp"
#include "farm/text.hpp"

namespace farm {

using nlohmann::json;

std::string url_encode(const std::string& value) {
  std::string out;
  out.reserve(value.size() * 3);
  for (unsigned char c : value) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      char buf[4];
      std::snprintf(buf, sizeof(buf), "%%%02X", c);
      out.append(buf);
    }
  }
  return out;
}

namespace {

// MediaWiki snippets carry <span class="searchmatch"> markup and entities.
std::string strip_markup(const std::string& html) {
  std::string out;
  out.reserve(html.size());
  for (std::size_t i = 0; i < html.size();) {
    if (html[i] == '<') {
      auto close = html.find('>', i);
      if (close == std::string::npos) break;
      i = close + 1;
      continue;
    }
    if (html[i] == '&') {
      auto semi = html.find(';', i);
      if (semi != std::string::npos && semi - i <= 6) {
        std::string entity = html.substr(i, semi - i + 1);
        if (entity == "&amp;") {
          out.push_back('&');
        } else if (entity == "&lt;") {
          out.push_back('<');
        } else if (entity == "&gt;") {
          out.push_back('>');
        } else if (entity == "&quot;") {
          out.push_back('"');
        } else if (entity == "&#39;" || entity == "&apos;") {
          out.push_back('\'');
        } else if (entity == "&nbsp;") {
          out.push_back(' ');
        } else {
          out.append(entity);
        }
        i = semi + 1;
        continue;
      }
    }
    out.push_back(html[i]);
    ++i;
  }
  return text::normalize_whitespace(out);
}

std::string article_url(const std::string& base_url, const std::string& title) {
  std::string path;
  for (char c : title) path.push_back(c == ' ' ? '_' : c);
  return base_url + "/wiki/" + url_encode(path);
}

void check_transport(const httplib::Result& res) {
  if (!res) {
    throw Error(Errc::Transport, "retrieval request failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 429) throw Error(Errc::RateLimited, "retrieval rate limited");
  if (res->status >= 500) {
    throw Error(Errc::Transport, "retrieval server error " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw Error(Errc::MalformedResponse,
                "retrieval status " + std::to_string(res->status) + ": " + res->body);
  }
}

}  // namespace

std::vector<KnowledgeSnippet> parse_wikipedia_response(const std::string& body,
                                                       const std::string& base_url) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedResponse, std::string("bad encyclopedia response: ") + e.what());
  }
  if (!doc.contains("query") || !doc["query"].contains("search")) {
    throw Error(Errc::MalformedResponse, "encyclopedia response missing query.search");
  }
  std::vector<KnowledgeSnippet> out;
  int rank = 0;
  for (const auto& item : doc["query"]["search"]) {
    KnowledgeSnippet s;
    s.text = strip_markup(item.value("snippet", ""));
    s.source_url = article_url(base_url, item.value("title", ""));
    s.rank = ++rank;
    if (s.text.empty()) {
      --rank;
      continue;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<KnowledgeSnippet> parse_web_search_response(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedResponse, std::string("bad search response: ") + e.what());
  }
  if (!doc.contains("organic_results")) {
    throw Error(Errc::MalformedResponse, "search response missing organic_results");
  }
  std::vector<KnowledgeSnippet> out;
  int rank = 0;
  for (const auto& item : doc["organic_results"]) {
    KnowledgeSnippet s;
    s.text = text::normalize_whitespace(item.value("snippet", ""));
    s.source_url = item.value("link", "");
    s.rank = ++rank;
    if (s.text.empty() || s.source_url.empty()) {
      --rank;
      continue;
    }
    out.push_back(std::move(s));
  }
  return out;
}

WikipediaRetriever::WikipediaRetriever(WikipediaConfig config)
    : config_(std::move(config)), bucket_(config_.requests_per_second, 1) {}

std::vector<KnowledgeSnippet> WikipediaRetriever::search(const std::string& query, int page_size) {
  auto fetch = [&]() {
    bucket_.acquire();
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_follow_location(true);
    std::string path = config_.api_path + "?action=query&list=search&format=json&srsearch=" +
                       url_encode(query) + "&srlimit=" + std::to_string(page_size);
    auto res = client.Get(path);
    check_transport(res);
    return parse_wikipedia_response(res->body, config_.base_url);
  };
  return with_backoff(config_.backoff, sleeper_, fetch);
}

WebSearchRetriever::WebSearchRetriever(WebSearchConfig config)
    : config_(std::move(config)), bucket_(config_.requests_per_second, 1) {}

std::vector<KnowledgeSnippet> WebSearchRetriever::search(const std::string& query, int page_size) {
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw Error(Errc::Config, "search API key not set; export " + config_.api_key_env);
  }
  std::string api_key(key);
  auto fetch = [&]() {
    bucket_.acquire();
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_follow_location(true);
    std::string path = config_.api_path + "?engine=" + url_encode(config_.engine) +
                       "&q=" + url_encode(query) + "&num=" + std::to_string(page_size) +
                       "&api_key=" + url_encode(api_key);
    auto res = client.Get(path);
    check_transport(res);
    return parse_web_search_response(res->body);
  };
  return with_backoff(config_.backoff, sleeper_, fetch);
}

}  // namespace farm
