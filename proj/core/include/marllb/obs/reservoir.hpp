#pragma once

#include <cstddef>
#include <vector>

#include "marllb/rng.hpp"

namespace marllb::obs {

struct Sample {
  double t = 0.0;      // seconds since episode start
  double value = 0.0;
};

// Fixed-size reservoir with unconditional placement: every insert lands at a
// modulo-random slot and overwrites whatever is there. No rejection path, so
// insertion cost is flat and recent samples statistically displace old ones.
class ReservoirBuffer {
 public:
  explicit ReservoirBuffer(std::size_t capacity);

  void insert(Sample s, Rng& rng);

  std::size_t capacity() const { return slots_.size(); }
  std::size_t filled() const { return filled_; }
  bool empty() const { return filled_ == 0; }

  // Occupied slots in slot order.
  std::vector<Sample> samples() const;

  void clear();

 private:
  std::vector<Sample> slots_;
  std::vector<char> used_;
  std::size_t filled_ = 0;
};

}  // namespace marllb::obs
