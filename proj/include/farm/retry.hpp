#pragma once

#include <chrono>
#include <functional>
#include <thread>

#include "farm/errors.hpp"

namespace farm {

struct BackoffPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds initial_delay{200};
  double factor = 2.0;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

inline void default_sleeper(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

// Runs fn, retrying on Transport/RateLimited with exponential backoff.
// Any other error, or exhaustion of attempts, propagates.
template <typename Fn>
auto with_backoff(const BackoffPolicy& policy, const Sleeper& sleep, Fn&& fn)
    -> decltype(fn()) {
  auto delay = policy.initial_delay;
  for (int attempt = 1;; ++attempt) {
    try {
      return fn();
    } catch (const Error& e) {
      if (!Error::retryable(e.code()) || attempt >= policy.max_attempts) throw;
    }
    sleep(delay);
    delay = std::chrono::milliseconds(
        static_cast<long long>(static_cast<double>(delay.count()) * policy.factor));
  }
}

}  // namespace farm
