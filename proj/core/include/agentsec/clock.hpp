// Injectable synthetic time. Every time-dependent component (token expiry,
// nonce windows, rate budgets) reads from a Clock so experiments are
// reproducible: nothing in the lab ever consults wall time.
#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>

namespace agentsec {

using Duration = std::chrono::milliseconds;
// Milliseconds since the synthetic run origin (t=0 at experiment start).
using Instant = std::chrono::milliseconds;

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Instant now() const = 0;
};

// Hand-advanced clock. now() is monotone: advance() only moves forward.
class ManualClock : public Clock {
 public:
  explicit ManualClock(Instant origin = Instant{0}) : now_(origin) {}

  Instant now() const override {
    std::lock_guard<std::mutex> lock(mu_);
    return now_;
  }

  void advance(Duration d) {
    std::lock_guard<std::mutex> lock(mu_);
    if (d.count() > 0) now_ += d;
  }

 private:
  mutable std::mutex mu_;
  Instant now_;
};

using ClockPtr = std::shared_ptr<Clock>;

inline ClockPtr make_manual_clock(Instant origin = Instant{0}) {
  return std::make_shared<ManualClock>(origin);
}

}  // namespace agentsec
