#pragma once

#include <chrono>
#include <cstdint>

namespace unital {

// Limits shared by the randomized and backtracking searches. Recorded
// verbatim in every result file.
struct SearchBudget {
  std::int64_t max_subgroups = 64;
  std::int64_t max_nodes = 50'000'000;
  std::int64_t wall_clock_ms = 15 * 60 * 1000;
  std::uint64_t seed = 1;
};

// Cooperative deadline check.
class Deadline {
public:
  explicit Deadline(std::int64_t ms)
      : end_(std::chrono::steady_clock::now() + std::chrono::milliseconds(ms)) {}
  bool passed() const { return std::chrono::steady_clock::now() >= end_; }

private:
  std::chrono::steady_clock::time_point end_;
};

}  // namespace unital
