#include "marllb/obs/reservoir.hpp"

#include <stdexcept>

namespace marllb::obs {

ReservoirBuffer::ReservoirBuffer(std::size_t capacity)
    : slots_(capacity), used_(capacity, 0) {
  if (capacity == 0) throw std::invalid_argument("reservoir capacity must be > 0");
}

void ReservoirBuffer::insert(Sample s, Rng& rng) {
  const std::size_t idx = static_cast<std::size_t>(rng.uniform_int(slots_.size()));
  slots_[idx] = s;
  if (!used_[idx]) {
    used_[idx] = 1;
    ++filled_;
  }
}

std::vector<Sample> ReservoirBuffer::samples() const {
  std::vector<Sample> out;
  out.reserve(filled_);
  for (std::size_t i = 0; i < slots_.size(); ++i)
    if (used_[i]) out.push_back(slots_[i]);
  return out;
}

void ReservoirBuffer::clear() {
  std::fill(used_.begin(), used_.end(), 0);
  filled_ = 0;
}

}  // namespace marllb::obs
