// Deterministic token bucket driven by the injected clock.
#pragma once

#include <cstdint>
#include <mutex>

#include "agentsec/clock.hpp"

namespace agentsec {

struct RateBudget {
  int capacity = 0;       // burst size
  int refill = 0;         // tokens restored per window
  Duration window{60000};
};

// Accepted requests over any interval of length t never exceed
// capacity + ceil(refill * t / window): refill progress is tracked exactly
// (integer micro-token accumulator), so the bound holds with no float drift.
class TokenBucket {
 public:
  TokenBucket(RateBudget budget, Instant start)
      : budget_(budget), tokens_(budget.capacity), last_(start) {}

  bool try_acquire(Instant now) {
    std::lock_guard<std::mutex> lock(mu_);
    refill(now);
    if (tokens_ <= 0) return false;
    --tokens_;
    return true;
  }

 private:
  void refill(Instant now) {
    if (now <= last_) return;
    micro_ += static_cast<std::int64_t>((now - last_).count()) * budget_.refill;
    last_ = now;
    std::int64_t gained = micro_ / budget_.window.count();
    if (gained > 0) {
      micro_ %= budget_.window.count();
      tokens_ = std::min<std::int64_t>(budget_.capacity, tokens_ + gained);
    }
  }

  const RateBudget budget_;
  std::int64_t tokens_;
  Instant last_;
  std::int64_t micro_ = 0;
  std::mutex mu_;
};

}  // namespace agentsec
