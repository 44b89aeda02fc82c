#include "marllb/rl/replay.hpp"

#include <stdexcept>

namespace marllb::rl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay: capacity must be positive");
}

void ReplayBuffer::push(TransitionRecord rec) {
  if (items_.size() == capacity_) items_.pop_front();
  items_.push_back(std::move(rec));
}

bool ReplayBuffer::window_ok(std::size_t start, std::size_t length) const {
  // Steps are consecutive within an episode and eviction only trims the
  // front, so matching endpoints imply the whole window is one episode run.
  const TransitionRecord& a = items_[start];
  const TransitionRecord& b = items_[start + length - 1];
  return a.episode == b.episode && b.step == a.step + (length - 1);
}

bool ReplayBuffer::can_sample(std::size_t length) const {
  if (length == 0 || items_.size() < length) return false;
  for (std::size_t s = 0; s + length <= items_.size(); ++s)
    if (window_ok(s, length)) return true;
  return false;
}

std::vector<const TransitionRecord*> ReplayBuffer::sample_sequence(
    std::size_t length, Rng& rng) const {
  if (length == 0) throw std::invalid_argument("replay: zero-length sample");
  if (items_.size() < length)
    throw std::runtime_error("replay: not enough transitions");
  std::vector<std::size_t> starts;
  starts.reserve(items_.size());
  for (std::size_t s = 0; s + length <= items_.size(); ++s)
    if (window_ok(s, length)) starts.push_back(s);
  if (starts.empty())
    throw std::runtime_error("replay: no in-episode window of that length");
  const std::size_t start = starts[rng.uniform_int(starts.size())];
  std::vector<const TransitionRecord*> out;
  out.reserve(length);
  for (std::size_t k = 0; k < length; ++k) out.push_back(&items_[start + k]);
  return out;
}

}  // namespace marllb::rl
