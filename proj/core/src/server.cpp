#include "marllb/sim/server.hpp"

#include <algorithm>
#include <stdexcept>

namespace marllb::sim {

double cpu_speed_per_task(int present, int cpu_count, int cpu_cap) {
  if (present < 0 || cpu_count < 1 || cpu_cap < 1)
    throw std::invalid_argument("cpu_speed_per_task: bad arguments");
  if (present == 0) return 0.0;
  if (present <= cpu_count) return 1.0;
  return static_cast<double>(cpu_count) /
         static_cast<double>(std::min(cpu_cap, present));
}

double io_speed_per_task(int active) {
  if (active < 0) throw std::invalid_argument("io_speed_per_task: negative count");
  if (active == 0) return 0.0;
  return 1.0 / static_cast<double>(active);
}

Admission admit_or_reject(const ServerRuntime& rt, QueueKind first_stage,
                          int backlog_limit) {
  if (first_stage == QueueKind::io) return Admission::service;
  if (rt.cpu_present() < rt.spec.cpu_cap) return Admission::service;
  if (static_cast<int>(rt.backlog.size()) < backlog_limit) return Admission::queued;
  return Admission::rejected;
}

double server_aggregate_speed(const ServerRuntime& rt) {
  const int present = rt.cpu_present();
  if (present == 0) return 0.0;
  const int served = std::min(rt.spec.cpu_cap, present);
  const double per_task =
      cpu_speed_per_task(present, rt.spec.cpu_count, rt.spec.cpu_cap);
  return rt.spec.rate * rt.capacity_factor * per_task *
         static_cast<double>(served);
}

}  // namespace marllb::sim
