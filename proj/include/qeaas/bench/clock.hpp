#pragma once
// Benchmark time base. Measurements go through the Clock interface so tests
// can inject scripted timestamps; wrap-safe tick arithmetic is provided for
// fixed-width counters (unsigned subtraction handles wrap correctly).

#include <chrono>
#include <cstdint>
#include <deque>
#include <stdexcept>

namespace qeaas::bench {

class Clock {
 public:
  virtual ~Clock() = default;
  virtual uint64_t now_us() = 0;
};

class SteadyClock final : public Clock {
 public:
  uint64_t now_us() override {
    return static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::microseconds>(
                                     std::chrono::steady_clock::now().time_since_epoch())
                                     .count());
  }
};

// Returns scripted absolute timestamps in order; after the script is
// exhausted, repeats the last value. With no script, behaves as a manually
// advanced clock starting at 0.
class FakeClock final : public Clock {
 public:
  FakeClock() = default;
  explicit FakeClock(std::deque<uint64_t> script) : script_(std::move(script)) {}

  uint64_t now_us() override {
    if (!script_.empty()) {
      last_ = script_.front();
      if (script_.size() > 1) script_.pop_front();
    }
    return last_;
  }
  void advance_us(uint64_t us) { last_ += us; }

 private:
  std::deque<uint64_t> script_;
  uint64_t last_ = 0;
};

// Wrap-safe duration between two readings of a 32-bit tick counter.
constexpr uint32_t tick_delta32(uint32_t start, uint32_t end) { return end - start; }
constexpr uint64_t tick_delta64(uint64_t start, uint64_t end) { return end - start; }

}  // namespace qeaas::bench
