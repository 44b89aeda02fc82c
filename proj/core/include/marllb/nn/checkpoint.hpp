#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "marllb/nn/tensor.hpp"

namespace marllb::nn {

// Versioned text container: a config hash line followed by named tensors
// with shape headers and hexfloat payloads, so reloads are bit-exact.
void save_checkpoint(const std::string& path, std::uint64_t config_hash,
                     const std::vector<NamedTensor>& tensors);

// Loads into the given tensors, validating names and shapes in order;
// returns the stored config hash.
std::uint64_t load_checkpoint(const std::string& path,
                              const std::vector<NamedTensor>& tensors);

}  // namespace marllb::nn
