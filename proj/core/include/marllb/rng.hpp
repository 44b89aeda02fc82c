#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "marllb/common.hpp"

namespace marllb {

// xoshiro256**. Hand-rolled so streams are identical across platforms and
// standard library versions; std distributions are not portable bit-for-bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  Rng(std::uint64_t base, std::string_view stream, std::uint64_t index = 0)
      : Rng(derive_stream_seed(base, stream, index)) {}

  std::uint64_t next_u64();

  // [0, 1), 53-bit resolution.
  double uniform01();
  double uniform(double lo, double hi);
  // Inverse CDF; mean > 0 required.
  double exponential(double mean);
  // Box-Muller, one value per call.
  double normal01();
  double normal(double mean, double stddev);
  // [0, n). Plain modulo; every user has n far below 2^32 so bias is ignorable,
  // and the reservoir contract wants modulo placement exactly.
  std::uint64_t uniform_int(std::uint64_t n);
  // Index draw proportional to strictly positive weights.
  std::size_t categorical(const std::vector<double>& weights);

 private:
  std::array<std::uint64_t, 4> s_;
};

}  // namespace marllb
