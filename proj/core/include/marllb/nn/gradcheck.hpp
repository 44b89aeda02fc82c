#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "marllb/nn/tensor.hpp"

namespace marllb::nn {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_tensor;
  std::size_t worst_index = 0;
};

// Central finite differences against the gradients already stored in the
// tensors, so run the analytic backward before calling. The loss must be a
// deterministic pure forward evaluation of the current parameter values.
// max_coords = 0 sweeps every coordinate, otherwise that many per tensor
// picked by select_seed.
GradCheckResult grad_check(const std::vector<NamedTensor>& params,
                           const std::function<double()>& loss,
                           double h = 1e-5, std::size_t max_coords = 0,
                           std::uint64_t select_seed = 1);

}  // namespace marllb::nn
