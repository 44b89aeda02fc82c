#pragma once

#include <cstdint>
#include <memory>
#include <queue>
#include <string>
#include <unordered_set>
#include <vector>

#include "marllb/lb/types.hpp"
#include "marllb/obs/observation.hpp"
#include "marllb/rng.hpp"
#include "marllb/sim/server.hpp"
#include "marllb/sim/traffic.hpp"

namespace marllb::sim {

struct LatencyRange {
  double lo = 1e-4;
  double hi = 1e-3;
};

struct CapacityChange {
  int server = 0;
  double time = 0.0;
  double cpu_factor = 1.0;  // multiplies per-task CPU speed from `time` on
};

struct EpisodeConfig {
  std::vector<ServerSpec> servers;
  std::size_t n_agents = 1;
  TrafficProfile profile;
  double duration = 60.0;
  double tick = 0.5;
  int backlog_limit = 64;
  double reject_timeout = 40.0;  // FCT charged to rejected tasks
  LatencyRange latency;
  std::vector<CapacityChange> capacity_changes;
  lb::RewardKind reward_kind = lb::RewardKind::vbf;
  std::size_t reservoir_duration = 16;
  std::size_t reservoir_tct = 16;
  std::size_t reservoir_arrival = 16;
  double stats_decay = 0.9;
  double obs_time_scale = 1.0;  // feature scale, typically mean task work
};

// Structured rejection of bad configs before any event runs.
void validate(const EpisodeConfig& cfg);

// Tie order at equal timestamps: capacity changes first so speeds are right,
// then server-side progress, then agent-side observations, then decisions.
enum class EventKind : int {
  capacity_change = 0,
  stage_complete = 1,
  task_arrival_at_server = 2,
  first_response_at_agent = 3,
  completion_at_agent = 4,
  task_arrival_at_agent = 5,
  decision_tick = 6,
  episode_end = 7,
};

struct SimEvent {
  double t = 0.0;
  EventKind kind = EventKind::decision_tick;
  std::uint64_t seq = 0;  // push order, the final tie breaker
  int task = -1;
  int server = -1;
  QueueKind queue = QueueKind::cpu;
  std::uint64_t epoch = 0;  // stage_complete only; stale when server moved on
  double value = 0.0;
};

struct TickLog {
  std::size_t index = 0;
  double t = 0.0;
  lb::LoadVector load;      // remaining processing time per server
  lb::PerAgentLoad split;   // the same, by owning agent
  std::vector<std::vector<double>> obs;           // per agent
  std::vector<std::vector<double>> action;        // applied weights per agent
  std::vector<double> reward;                     // for the interval ending here
  std::vector<std::vector<double>> reward_input;  // per agent duration averages
  long long generated = 0, completed = 0, rejected = 0, in_flight = 0;
};

struct TaskOutcome {
  int id = -1;
  int agent = 0;
  int server = -1;
  double t_arrival = 0.0;
  double fct = 0.0;
  bool rejected = false;
};

struct SimTrace {
  std::vector<TickLog> ticks;  // one per decision tick plus the final state
  std::vector<TaskOutcome> outcomes;
  std::vector<std::string> warnings;
  double max_stage_work_error = 0.0;  // relative work-conservation slack
  long long generated = 0, completed = 0, rejected = 0, unfinished = 0;

  std::vector<double> fct_values() const;
  std::uint64_t hash() const;
};

class Engine;

struct TickView {
  std::size_t agent = 0;
  std::size_t tick_index = 0;
  double t = 0.0;
  const std::vector<double>& obs;
  double reward = 0.0;
  bool first = false;  // no finished interval behind this observation yet
};

struct EndView {
  std::size_t agent = 0;
  double t = 0.0;
  const std::vector<double>& obs;
  double reward = 0.0;
};

struct PickView {
  std::size_t agent = 0;
  double now = 0.0;
  const std::vector<int>& ongoing;  // this agent's view, task not yet counted
  const TaskRecord& task;
  Rng& rng;  // the agent's policy stream
  Engine& engine;
};

// Per-agent decision maker. pick_server runs once per task; on_tick runs at
// every decision interval with the frozen observation and the reward for the
// interval that just ended.
class AgentPolicy {
 public:
  virtual ~AgentPolicy() = default;
  virtual void begin_episode(std::size_t /*agent*/, const EpisodeConfig& /*cfg*/) {}
  virtual void on_tick(const TickView& /*view*/) {}
  virtual std::size_t pick_server(const PickView& view) = 0;
  virtual void end_episode(const EndView& /*view*/) {}
  // Simplex weights currently applied, when the policy has any; mirrored into
  // the observation's previous-action block.
  virtual const std::vector<double>* current_action() const { return nullptr; }
};

class Engine {
 public:
  Engine(EpisodeConfig cfg, std::vector<std::shared_ptr<AgentPolicy>> policies,
         std::uint64_t seed);

  // Extra capacity events beyond the config's; only before run().
  void schedule_capacity_change(const CapacityChange& change);

  SimTrace run();

  const EpisodeConfig& config() const { return cfg_; }

  // Committed remaining processing time per server: residual work of every
  // task bound to the server (in service, waiting, queued or still on the
  // wire) divided by the current effective drain speed of its queue.
  lb::LoadVector remaining_time_vector(double now);

  // The same for one server with `task` hypothetically added.
  double remaining_time_with(std::size_t server, const TaskRecord& task, double now);

  // Projected completion time of `task` if sent to `server` now: replays the
  // server's own queue dynamics forward with no further arrivals. This is
  // what the full-information baseline minimises.
  double completion_time_estimate(std::size_t server, const TaskRecord& task,
                                  double now);

 private:
  struct TaskState {
    TaskRecord rec;
    enum class Phase {
      pending, wire, cpu_active, cpu_wait, backlog, io_active, done, rejected
    } phase = Phase::pending;
    int server = -1;
    std::size_t stage = 0;
    double residual = 0.0;    // current stage, work-seconds
    double integrated = 0.0;  // served work on the current stage
    double t_first_service = -1.0;
    double t_completed = -1.0;

    double remaining_cpu() const;
    double remaining_io() const;
  };

  void push(SimEvent ev);
  void advance(std::size_t j, double now);
  void advance_all(double now);
  void schedule_cpu_completion(std::size_t j, double now);
  void schedule_io_completion(std::size_t j, double now);
  void enter_service(TaskState& ts, std::size_t j, QueueKind q, double now);
  void promote_waiters(std::size_t j, double now);
  void complete_stage(TaskState& ts, std::size_t j, QueueKind q, double now);
  void finish_task(TaskState& ts, double now);

  void handle_arrival_at_agent(const SimEvent& ev);
  void handle_arrival_at_server(const SimEvent& ev);
  void handle_stage_complete(const SimEvent& ev);
  void handle_first_response(const SimEvent& ev);
  void handle_completion_at_agent(const SimEvent& ev);
  void handle_tick(const SimEvent& ev);

  void compute_load(double now, lb::LoadVector& load, lb::PerAgentLoad& split);
  void record_tick(std::size_t index, double t, bool final_tick);
  double agent_reward(std::size_t i, double now, std::vector<double>& avg_out);

  EpisodeConfig cfg_;
  std::vector<std::shared_ptr<AgentPolicy>> policies_;
  std::uint64_t seed_ = 0;

  std::vector<ServerRuntime> servers_;
  std::vector<TaskState> tasks_;
  std::vector<obs::AgentChannels> channels_;
  std::vector<double> last_arrival_;  // per agent, for inter-arrival gaps
  obs::ObservationScaling scaling_;

  Rng latency_rng_;
  std::vector<Rng> policy_rng_;
  std::vector<Rng> reservoir_rng_;

  struct EventOrder {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      if (a.t != b.t) return a.t > b.t;
      if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind);
      return a.seq > b.seq;
    }
  };
  std::priority_queue<SimEvent, std::vector<SimEvent>, EventOrder> queue_;
  std::uint64_t next_seq_ = 0;

  SimTrace trace_;
  long long generated_ = 0, completed_ = 0, rejected_ = 0;
  std::unordered_set<int> in_system_;
  bool ran_ = false;
};

SimTrace run_episode(const EpisodeConfig& cfg,
                     const std::vector<std::shared_ptr<AgentPolicy>>& policies,
                     std::uint64_t seed);

}  // namespace marllb::sim
