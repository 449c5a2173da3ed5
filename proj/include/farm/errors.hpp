#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace farm {

enum class Errc {
  // scenario validation
  InvalidScenario,
  MissingField,
  EmptyField,
  BadLabel,
  // backend
  Transport,
  RateLimited,
  ContextOverflow,
  BackendRefusal,
  EmptySequence,
  // cache
  StoreUnavailable,
  // foveation
  EmptyBank,
  EmptyGeneration,
  RetryExhausted,
  // retrieval
  MalformedResponse,
  InvalidN,
  // rationalization
  ParseFailure,
  // uncertainty
  EmptyDistribution,
  NonPositiveCount,
  JoinFailure,
  // dataset
  ParseError,
  DuplicateId,
  // configuration / usage
  Config,
};

std::string_view errc_name(Errc code);

// Single exception type for the whole pipeline; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

  static bool retryable(Errc code) noexcept {
    return code == Errc::Transport || code == Errc::RateLimited;
  }

 private:
  Errc code_;
};

}  // namespace farm
