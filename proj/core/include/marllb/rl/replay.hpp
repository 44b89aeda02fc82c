#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "marllb/rng.hpp"

namespace marllb::rl {

struct TransitionRecord {
  std::vector<double> prev_action;  // raw pre-weight action behind obs
  std::vector<double> obs;
  std::vector<double> action;       // raw action taken at obs
  double reward = 0.0;
  std::vector<double> next_obs;
  std::uint64_t episode = 0;
  std::size_t step = 0;
};

// FIFO ring over whole transitions; sampled windows stay inside one episode.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 3000);

  void push(TransitionRecord rec);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const TransitionRecord& at(std::size_t i) const { return items_[i]; }

  bool can_sample(std::size_t length) const;
  // Uniform over in-episode windows; pointers stay valid until the next push.
  std::vector<const TransitionRecord*> sample_sequence(std::size_t length,
                                                       Rng& rng) const;

 private:
  bool window_ok(std::size_t start, std::size_t length) const;

  std::deque<TransitionRecord> items_;
  std::size_t capacity_;
};

}  // namespace marllb::rl
