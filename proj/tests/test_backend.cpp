#include <doctest.h>

#include <cmath>

#include "farm/backend.hpp"
#include "farm/canonical.hpp"
#include "farm/errors.hpp"
#include "farm/mock_backend.hpp"
#include "farm/retry.hpp"
#include "test_util.hpp"

using namespace farm;

TEST_SUITE("backend") {

TEST_CASE("generation params default to the greedy profile") {
  GenerationParams p;
  CHECK(p.max_tokens == 128);
  CHECK(p.temperature == 0.0);
  CHECK(p.top_p == 1.0);
  CHECK(p.presence_penalty == 0.0);
  CHECK(p.frequency_penalty == 0.0);
  CHECK(p.top_logprobs == 5);
  CHECK(p.stop.empty());
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("the imaginative retry profile raises temperature and both penalties") {
  GenerationParams p;
  p.stop = {"Q:", "A:"};
  GenerationParams creative = creative_retry_profile(p);
  CHECK(creative.temperature == 1.0);
  CHECK(creative.presence_penalty == 2.0);
  CHECK(creative.frequency_penalty == 2.0);
  // Everything else is untouched.
  CHECK(creative.max_tokens == p.max_tokens);
  CHECK(creative.top_p == p.top_p);
  CHECK(creative.stop == p.stop);
  CHECK(creative.top_logprobs == p.top_logprobs);
}

TEST_CASE("params validation rejects out-of-range fields") {
  auto rejects = [](auto mutate) {
    GenerationParams p;
    mutate(p);
    try {
      p.validate();
      return false;
    } catch (const Error& e) {
      return e.code() == Errc::Config;
    }
  };
  CHECK(rejects([](GenerationParams& p) { p.max_tokens = 0; }));
  CHECK(rejects([](GenerationParams& p) { p.temperature = -0.5; }));
  CHECK(rejects([](GenerationParams& p) { p.top_p = 1.5; }));
  CHECK(rejects([](GenerationParams& p) { p.presence_penalty = 3.0; }));
  CHECK(rejects([](GenerationParams& p) { p.stop = {"a", "b", "c", "d", "e"}; }));
  CHECK(rejects([](GenerationParams& p) { p.top_logprobs = -1; }));
}

TEST_CASE("params and completions round-trip through JSON") {
  GenerationParams p;
  p.temperature = 1.0;
  p.stop = {"Q:"};
  GenerationParams q = GenerationParams::from_json(p.to_json());
  CHECK(q.to_json() == p.to_json());

  Completion c = MockBackend::make_completion("two words", -0.25);
  Completion d = Completion::from_json(c.to_json());
  CHECK(d.to_json() == c.to_json());
  CHECK(d.text == "two words");
  CHECK(d.tokens.size() == 2);
}

TEST_CASE("sequence log-likelihood sums token logprobs") {
  Completion c = MockBackend::make_completion("a b c", -0.5);
  CHECK(sequence_log_likelihood(c) == doctest::Approx(-1.5));
  Completion empty;
  try {
    sequence_log_likelihood(empty);
    FAIL("expected an empty-sequence error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptySequence);
  }
}

TEST_CASE("budget pre-check flags prompts that cannot fit") {
  MockBackend backend;
  backend.set_context_budget("m", 40);
  GenerationParams p;
  p.max_tokens = 10;  // 40 - 10 leaves 30 tokens => ~120 chars of prompt
  CHECK_NOTHROW(ensure_within_budget(backend, "m", std::string(100, 'x'), p));
  try {
    ensure_within_budget(backend, "m", std::string(200, 'x'), p);
    FAIL("expected a context-overflow error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ContextOverflow);
  }
}

TEST_CASE("request digests are stable and sensitive to every field") {
  GenerationParams p;
  std::string base = completion_request_digest("m", "prompt", p);
  CHECK(base == completion_request_digest("m", "prompt", p));
  CHECK(base.size() == 64);
  CHECK(base != completion_request_digest("m2", "prompt", p));
  CHECK(base != completion_request_digest("m", "prompt2", p));
  GenerationParams hot = p;
  hot.temperature = 1.0;
  CHECK(base != completion_request_digest("m", "prompt", hot));
  GenerationParams stopped = p;
  stopped.stop = {"Q:"};
  CHECK(base != completion_request_digest("m", "prompt", stopped));

  CHECK(retrieval_request_digest("web", "q", 10) == retrieval_request_digest("web", "q", 10));
  CHECK(retrieval_request_digest("web", "q", 10) != retrieval_request_digest("wiki", "q", 10));
  CHECK(retrieval_request_digest("web", "q", 10) != retrieval_request_digest("web", "q", 5));
}

TEST_CASE("the scripted backend replays by digest and records requests") {
  MockBackend backend;
  GenerationParams p;
  backend.script("m", "hello", p, MockBackend::make_completion("world"));

  Completion c = backend.complete("m", "hello", p);
  CHECK(c.text == "world");
  CHECK(c.model_id == "m");
  // Identical request, identical bytes.
  CHECK(backend.complete("m", "hello", p).to_json() == c.to_json());

  REQUIRE(backend.requests().size() == 2);
  CHECK(backend.requests()[0].prompt == "hello");
  CHECK(backend.requests()[0].model_id == "m");

  try {
    backend.complete("m", "unscripted", p);
    FAIL("expected a refusal");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BackendRefusal);
  }
}

TEST_CASE("scripted sequences advance and the last entry sticks") {
  MockBackend backend;
  GenerationParams p;
  p.temperature = 1.0;
  backend.script_sequence("m", "sample", p,
                          {MockBackend::make_completion("first"),
                           MockBackend::make_completion("second")});
  CHECK(backend.complete("m", "sample", p).text == "first");
  CHECK(backend.complete("m", "sample", p).text == "second");
  CHECK(backend.complete("m", "sample", p).text == "second");
}

TEST_CASE("fixture files round-trip through the directory constructor") {
  testutil::TempDir dir;
  GenerationParams p;
  p.stop = {"Q:", "A:"};
  MockBackend::write_fixture(dir.path, "m", "the prompt", p,
                             {MockBackend::make_completion("the answer")});
  MockBackend backend(dir.path);
  CHECK(backend.complete("m", "the prompt", p).text == "the answer");
}

TEST_CASE("made completions preserve whitespace across tokens") {
  Completion c = MockBackend::make_completion("No. Based on info", -0.1);
  std::string rebuilt;
  for (const auto& t : c.tokens) rebuilt += t.token;
  CHECK(rebuilt == "No. Based on info");
  CHECK(c.tokens.size() == 4);
  for (const auto& t : c.tokens) CHECK(t.logprob == doctest::Approx(-0.1));
  CHECK_FALSE(c.first_token_alternatives.empty());
  CHECK(c.first_token_alternatives[0].token == c.tokens[0].token);
}

TEST_CASE("backoff retries transport errors with growing delays") {
  int calls = 0;
  std::vector<long long> delays;
  Sleeper counting = [&](std::chrono::milliseconds d) { delays.push_back(d.count()); };
  BackoffPolicy policy;
  policy.max_attempts = 4;
  policy.initial_delay = std::chrono::milliseconds(10);

  int result = with_backoff(policy, counting, [&] {
    if (++calls < 3) throw Error(Errc::Transport, "flaky");
    return 42;
  });
  CHECK(result == 42);
  CHECK(calls == 3);
  CHECK(delays == std::vector<long long>{10, 20});
}

TEST_CASE("backoff gives up after max attempts and skips non-retryable errors") {
  Sleeper noop = [](std::chrono::milliseconds) {};
  BackoffPolicy policy;
  policy.max_attempts = 3;

  int calls = 0;
  CHECK_THROWS_AS(with_backoff(policy, noop, [&]() -> int {
                    ++calls;
                    throw Error(Errc::RateLimited, "always");
                  }),
                  Error);
  CHECK(calls == 3);

  calls = 0;
  CHECK_THROWS_AS(with_backoff(policy, noop, [&]() -> int {
                    ++calls;
                    throw Error(Errc::BackendRefusal, "fatal");
                  }),
                  Error);
  CHECK(calls == 1);
}

}  // TEST_SUITE
