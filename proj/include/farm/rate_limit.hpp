#pragma once

#include <chrono>
#include <condition_variable>
#include <mutex>

namespace farm {

// Token-bucket limiter. acquire() blocks until a token is available.
// rate <= 0 disables limiting.
class TokenBucket {
 public:
  TokenBucket(double tokens_per_second, double burst);

  void acquire();

 private:
  double rate_;
  double burst_;
  double tokens_;
  std::chrono::steady_clock::time_point last_refill_;
  std::mutex mutex_;
};

// Counting semaphore bounding concurrent operations; limit <= 0 disables.
class InFlightLimiter {
 public:
  explicit InFlightLimiter(int limit) : limit_(limit), in_flight_(0) {}

  class Guard {
   public:
    explicit Guard(InFlightLimiter& limiter) : limiter_(limiter) { limiter_.enter(); }
    ~Guard() { limiter_.leave(); }
    Guard(const Guard&) = delete;
    Guard& operator=(const Guard&) = delete;

   private:
    InFlightLimiter& limiter_;
  };

 private:
  void enter();
  void leave();

  int limit_;
  int in_flight_;
  std::mutex mutex_;
  std::condition_variable cv_;
};

}  // namespace farm
