#pragma once

#include <cstddef>
#include <vector>

#include "marllb/nn/tensor.hpp"

namespace marllb::nn {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class AdamOptimizer {
 public:
  explicit AdamOptimizer(std::vector<Tensor*> params, AdamConfig cfg = {});

  // One bias-corrected update from the accumulated gradients, which are then
  // zeroed. Any non-finite gradient skips the whole step and counts an
  // incident instead of poisoning the parameters.
  void step();
  std::size_t steps() const { return step_; }
  std::size_t skipped() const { return skipped_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  std::vector<Tensor*> params_;
  AdamConfig cfg_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::size_t step_ = 0;
  std::size_t skipped_ = 0;
};

}  // namespace marllb::nn
