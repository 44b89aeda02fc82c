#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace marllb::sim {

enum class QueueKind { cpu, io };

struct StageSpec {
  QueueKind queue = QueueKind::cpu;
  double mean_work = 1.0;  // exponential mean, seconds at unit speed
};

// A task template: alternating processing stages plus the aggregate Poisson
// arrival rate the generator splits evenly across agents. cpu_fraction and
// mean_work record the make_profile parameters verbatim so serialization
// round-trips exactly instead of re-deriving them from stage means.
struct TrafficProfile {
  std::string name = "cpu100";
  std::vector<StageSpec> stages{{QueueKind::cpu, 1.0}};
  double rate = 1.0;  // tasks per second, cluster-wide
  double cpu_fraction = 1.0;
  double mean_work = 1.0;
};

// cpu_fraction of the unit mean task is CPU work; the rest is a single IO
// stage sandwiched between two equal CPU halves. Pure profiles collapse to
// one stage.
TrafficProfile make_profile(const std::string& name, double cpu_fraction,
                            double rate, double mean_total_work = 1.0);

double mean_cpu_work(const TrafficProfile& p);
double mean_io_work(const TrafficProfile& p);
double mean_total_work(const TrafficProfile& p);

struct TaskStage {
  QueueKind queue;
  double work;  // sampled nominal work, seconds at unit speed
};

struct TaskRecord {
  int id = -1;
  int agent = 0;
  double t_arrival = 0.0;  // at the agent
  std::vector<TaskStage> stages;

  double cpu_work() const;
  double io_work() const;
  double total_work() const;
};

// Poisson arrivals over [0, duration) split evenly across agents, with
// per-stage exponential work draws. Each agent consumes its own arrival and
// workload streams so traces are reproducible per (seed, agent) regardless
// of how other agents are configured. Task ids are agent-major.
std::vector<std::vector<TaskRecord>> generate_arrivals(const TrafficProfile& profile,
                                                       std::size_t n_agents,
                                                       double duration,
                                                       std::uint64_t seed);

}  // namespace marllb::sim
