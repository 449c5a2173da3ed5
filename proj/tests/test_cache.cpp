#include <doctest.h>

#include <fstream>

#include "farm/caching.hpp"
#include "farm/canonical.hpp"
#include "farm/errors.hpp"
#include "farm/mock_backend.hpp"
#include "farm/retrievers.hpp"
#include "test_util.hpp"

using namespace farm;
using namespace testutil;

namespace {

// Retriever that counts how often the network would have been hit.
struct CountingRetriever : Retriever {
  std::vector<KnowledgeSnippet> canned;
  int calls = 0;

  std::vector<KnowledgeSnippet> search(const std::string&, int) override {
    ++calls;
    return canned;
  }
};

}  // namespace

TEST_SUITE("cache") {
  TEST_CASE("put then get returns the stored bytes") {
    TempDir tmp;
    FileCache cache(tmp.path / "cache");
    CacheKey key{CacheNamespace::Completion, sha256_hex("request-a")};

    CHECK_FALSE(cache.get(key).has_value());
    const std::string value = "line one\nline two\0with a nul byte";
    cache.put(key, value);
    auto hit = cache.get(key);
    REQUIRE(hit.has_value());
    CHECK(*hit == value);
  }

  TEST_CASE("entries in different namespaces do not collide") {
    TempDir tmp;
    FileCache cache(tmp.path / "cache");
    const std::string digest = sha256_hex("shared");
    cache.put({CacheNamespace::Completion, digest}, "completion payload");
    cache.put({CacheNamespace::Retrieval, digest}, "retrieval payload");

    CHECK(cache.get({CacheNamespace::Completion, digest}) == "completion payload");
    CHECK(cache.get({CacheNamespace::Retrieval, digest}) == "retrieval payload");
    CHECK(cache.entry_path({CacheNamespace::Completion, digest}) !=
          cache.entry_path({CacheNamespace::Retrieval, digest}));
  }

  TEST_CASE("entry paths shard by digest prefix") {
    TempDir tmp;
    FileCache cache(tmp.path / "cache");
    const std::string digest = "ab" + std::string(62, 'f');
    const auto path = cache.entry_path({CacheNamespace::Retrieval, digest});
    CHECK(path.parent_path().filename() == "ab");
    CHECK(path.filename() == digest);
  }

  TEST_CASE("empty values are refused") {
    TempDir tmp;
    FileCache cache(tmp.path / "cache");
    CHECK_THROWS_AS(cache.put({CacheNamespace::Completion, sha256_hex("x")}, ""), Error);
  }

  TEST_CASE("tampered payload reads as a miss and is evicted") {
    TempDir tmp;
    FileCache cache(tmp.path / "cache");
    CacheKey key{CacheNamespace::Retrieval, sha256_hex("tamper-me")};
    cache.put(key, "original payload");

    const auto path = cache.entry_path(key);
    {
      // Keep the header (and its checksum) but flip the payload bytes.
      std::ifstream in(path, std::ios::binary);
      std::string header;
      std::getline(in, header);
      in.close();
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      out << header << '\n' << "tampered payload";
    }

    CHECK_FALSE(cache.get(key).has_value());
    CHECK_FALSE(std::filesystem::exists(path));
    // A later put works again.
    cache.put(key, "replacement");
    CHECK(cache.get(key) == "replacement");
  }

  TEST_CASE("garbage header reads as a miss") {
    TempDir tmp;
    FileCache cache(tmp.path / "cache");
    CacheKey key{CacheNamespace::Completion, sha256_hex("garbage-header")};
    cache.put(key, "payload");
    write_file(cache.entry_path(key), "not a checksum line\npayload");
    CHECK_FALSE(cache.get(key).has_value());
  }

  TEST_CASE("caching backend serves repeats without touching the inner backend") {
    TempDir tmp;
    FileCache cache(tmp.path / "cache");
    MockBackend mock;
    GenerationParams params;
    mock.script("m", "prompt", params, MockBackend::make_completion("No. It is unsafe."));

    CachingBackend cached(mock, &cache);
    Completion first = cached.complete("m", "prompt", params);
    Completion second = cached.complete("m", "prompt", params);

    CHECK(mock.requests().size() == 1);
    CHECK(first.to_json() == second.to_json());

    // A second wrapper over the same directory still hits the stored entry.
    MockBackend empty_mock;
    CachingBackend warm(empty_mock, &cache);
    Completion third = warm.complete("m", "prompt", params);
    CHECK(empty_mock.requests().empty());
    CHECK(third.to_json() == first.to_json());
  }

  TEST_CASE("caching backend distinguishes generation params") {
    TempDir tmp;
    FileCache cache(tmp.path / "cache");
    MockBackend mock;
    GenerationParams greedy;
    GenerationParams warm = greedy;
    warm.temperature = 1.0;
    mock.script("m", "prompt", greedy, MockBackend::make_completion("greedy answer"));
    mock.script("m", "prompt", warm, MockBackend::make_completion("sampled answer"));

    CachingBackend cached(mock, &cache);
    CHECK(cached.complete("m", "prompt", greedy).text == "greedy answer");
    CHECK(cached.complete("m", "prompt", warm).text == "sampled answer");
    CHECK(mock.requests().size() == 2);
  }

  TEST_CASE("null cache degrades to a pass-through") {
    MockBackend mock;
    GenerationParams params;
    mock.script("m", "p", params, MockBackend::make_completion("hi"));
    CachingBackend cached(mock, nullptr);
    cached.complete("m", "p", params);
    cached.complete("m", "p", params);
    CHECK(mock.requests().size() == 2);
  }

  TEST_CASE("caching retriever stores parsed snippet lists") {
    TempDir tmp;
    FileCache cache(tmp.path / "cache");
    CountingRetriever inner;
    inner.canned = {{"Wash hands with soap.", "https://www.cdc.gov/handwashing", 1},
                    {"Second snippet.", "https://example.org/page", 2}};

    CachingRetriever cached(inner, "web", &cache);
    auto first = cached.search("is it safe", 10);
    auto second = cached.search("is it safe", 10);
    CHECK(inner.calls == 1);
    REQUIRE(second.size() == 2);
    CHECK(second[0].source_url == first[0].source_url);
    CHECK(second[0].text == first[0].text);
    CHECK(second[0].rank == 1);
    CHECK(second[1].rank == 2);

    // Different page size is a different request.
    cached.search("is it safe", 3);
    CHECK(inner.calls == 2);
  }

  TEST_CASE("caching retriever falls back to a fresh search on an unparseable payload") {
    TempDir tmp;
    FileCache cache(tmp.path / "cache");
    CountingRetriever inner;
    inner.canned = {{"text", "https://www.epa.gov/a", 1}};

    CachingRetriever cached(inner, "web", &cache);
    cached.search("q", 10);
    CHECK(inner.calls == 1);

    // Overwrite the entry with checksum-valid but non-JSON bytes.
    CacheKey key{CacheNamespace::Retrieval, retrieval_request_digest("web", "q", 10)};
    cache.put(key, "this is not json");
    auto again = cached.search("q", 10);
    CHECK(inner.calls == 2);
    REQUIRE(again.size() == 1);
    CHECK(again[0].source_url == "https://www.epa.gov/a");
    // The fresh result replaced the corrupt payload.
    cached.search("q", 10);
    CHECK(inner.calls == 2);
  }
}
