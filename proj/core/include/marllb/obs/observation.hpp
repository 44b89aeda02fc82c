#pragma once

#include <cstddef>
#include <vector>

#include "marllb/obs/reservoir.hpp"
#include "marllb/obs/stats.hpp"

namespace marllb::obs {

// Everything one agent accumulates locally about the cluster. `ongoing` is
// the same counter vector the dispatch rule reads; the observation's count
// block is built from it directly, never from a parallel copy.
struct AgentChannels {
  std::size_t n_servers = 0;
  std::vector<int> ongoing;                    // tasks assigned, not yet seen done
  std::vector<ReservoirBuffer> duration;       // per server: time to first response
  std::vector<ReservoirBuffer> tct;            // per server: task completion time
  ReservoirBuffer interarrival;                // gaps between this agent's arrivals
  std::vector<double> prev_action;             // applied simplex weights
  std::vector<double> last_duration_avg;       // reward fallback, 0 until first sample

  AgentChannels(std::size_t servers, std::size_t res_duration, std::size_t res_tct,
                std::size_t res_arrival);
};

struct ObservationLayout {
  std::size_t n_servers = 0;

  // Per server: count + five duration scalars + five completion scalars,
  // then the agent's five inter-arrival scalars, then the previous action.
  std::size_t dim() const { return n_servers * 11 + 5 + n_servers; }
  std::size_t server_offset(std::size_t j) const { return j * 11; }
  std::size_t interarrival_offset() const { return n_servers * 11; }
  std::size_t action_offset() const { return n_servers * 11 + 5; }
};

struct ObservationScaling {
  std::vector<double> count_scale;  // per server, typically 1 / concurrency cap
  double time_scale = 1.0;          // typically the profile's mean task work
};

// Flattens the channel state at time `now` into the fixed layout. Throws if
// any produced feature is non-finite.
std::vector<double> build_observation(const AgentChannels& ch, double now,
                                      const ObservationScaling& scaling,
                                      double decay = 0.9);

}  // namespace marllb::obs
