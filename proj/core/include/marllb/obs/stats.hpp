#pragma once

#include <array>
#include <vector>

#include "marllb/obs/reservoir.hpp"

namespace marllb::obs {

// Five-scalar summary of a sample set, the building block of observations.
struct SampleStats {
  double mean = 0.0;
  double p90 = 0.0;        // nearest-rank
  double stddev = 0.0;     // population
  double discounted = 0.0; // decay^(now - t) weighted average
  double weighted = 0.0;   // additionally weighted by the gap to the previous sample

  std::array<double, 5> as_array() const {
    return {mean, p90, stddev, discounted, weighted};
  }
};

// Order-insensitive: samples are sorted by (t, value) internally, so any
// reservoir slot permutation reduces to the same stats. `now` anchors the
// discount; `decay` is the per-second factor. Empty input reduces to zeros.
// The first sample in time order has no predecessor, so its gap weight is 1.
SampleStats reduce_stats(std::vector<Sample> samples, double now,
                         double decay = 0.9);

}  // namespace marllb::obs
