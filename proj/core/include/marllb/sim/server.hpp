#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "marllb/sim/traffic.hpp"

namespace marllb::sim {

struct ServerSpec {
  int cpu_count = 1;
  // Concurrency cap: tasks admitted to the CPU beyond it wait unserved.
  int cpu_cap = 1;
  double rate = 1.0;  // per-CPU nominal speed, work-seconds per second
  bool io_capable = true;
};

// Blocked processor sharing. Each of the min(cap, present) served tasks runs
// at full speed while the CPUs are not oversubscribed, otherwise the CPUs
// are shared evenly among the served set.
double cpu_speed_per_task(int present, int cpu_count, int cpu_cap);

// Plain processor sharing across however many IO tasks are active.
double io_speed_per_task(int active);

enum class Admission { service, queued, rejected };

struct ServerRuntime {
  ServerSpec spec;
  double capacity_factor = 1.0;
  std::vector<int> cpu_active;  // task ids in CPU service, size <= cpu_cap
  std::deque<int> cpu_wait;     // mid-task re-entries, never rejected
  std::deque<int> backlog;      // fresh arrivals waiting for a CPU slot
  std::vector<int> io_active;
  std::vector<int> wire;        // assigned, still in network transit
  double last_advance = 0.0;
  std::uint64_t cpu_epoch = 0;  // bumped whenever CPU drain speed changes
  std::uint64_t io_epoch = 0;

  int cpu_present() const { return static_cast<int>(cpu_active.size()); }
};

// Admission decision for a fresh task arriving at the server. Re-entries of
// tasks already on the server never take this path.
Admission admit_or_reject(const ServerRuntime& rt, QueueKind first_stage,
                          int backlog_limit);

// Total work-seconds per second the server currently delivers on the CPU
// side, including the capacity factor.
double server_aggregate_speed(const ServerRuntime& rt);

}  // namespace marllb::sim
