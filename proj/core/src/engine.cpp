#include "marllb/sim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "marllb/lb/fairness.hpp"

namespace marllb::sim {

namespace {

// Residual slack below which a stage counts as finished; float drift from
// event projection sits many orders below this.
constexpr double kCompleteEps = 1e-9;

void erase_id(std::vector<int>& v, int id) {
  auto it = std::find(v.begin(), v.end(), id);
  if (it == v.end()) throw std::logic_error("engine: id missing from queue list");
  *it = v.back();
  v.pop_back();
}

int drain_parallelism(const ServerRuntime& rt, int committed) {
  const int ceiling = std::min(rt.spec.cpu_count, rt.spec.cpu_cap);
  return std::clamp(committed, 1, ceiling);
}

}  // namespace

void validate(const EpisodeConfig& cfg) {
  if (cfg.servers.empty()) throw std::invalid_argument("config: no servers");
  for (const auto& s : cfg.servers) {
    if (s.cpu_count < 1) throw std::invalid_argument("config: cpu_count must be >= 1");
    if (s.cpu_cap < 1) throw std::invalid_argument("config: cpu_cap must be >= 1");
    if (!(s.rate > 0.0) || !std::isfinite(s.rate))
      throw std::invalid_argument("config: server rate must be > 0");
  }
  if (cfg.n_agents == 0) throw std::invalid_argument("config: no agents");
  if (!(cfg.duration > 0.0)) throw std::invalid_argument("config: duration must be > 0");
  if (!(cfg.tick > 0.0) || cfg.tick > cfg.duration)
    throw std::invalid_argument("config: tick must be in (0, duration]");
  if (cfg.backlog_limit < 0) throw std::invalid_argument("config: negative backlog limit");
  if (!(cfg.reject_timeout > 0.0))
    throw std::invalid_argument("config: reject_timeout must be > 0");
  if (cfg.latency.lo < 0.0 || cfg.latency.hi < cfg.latency.lo)
    throw std::invalid_argument("config: bad latency range");
  if (!(cfg.profile.rate > 0.0))
    throw std::invalid_argument("config: traffic rate must be > 0");
  if (cfg.profile.stages.empty())
    throw std::invalid_argument("config: traffic profile has no stages");
  for (const auto& st : cfg.profile.stages)
    if (!(st.mean_work > 0.0))
      throw std::invalid_argument("config: stage mean_work must be > 0");
  if (cfg.reservoir_duration == 0 || cfg.reservoir_tct == 0 || cfg.reservoir_arrival == 0)
    throw std::invalid_argument("config: reservoir sizes must be > 0");
  if (!(cfg.stats_decay > 0.0) || cfg.stats_decay > 1.0)
    throw std::invalid_argument("config: stats_decay must be in (0, 1]");
  if (!(cfg.obs_time_scale > 0.0))
    throw std::invalid_argument("config: obs_time_scale must be > 0");
  for (const auto& cc : cfg.capacity_changes) {
    if (cc.server < 0 || cc.server >= static_cast<int>(cfg.servers.size()))
      throw std::invalid_argument("config: capacity change server out of range");
    if (cc.time < 0.0 || cc.time > cfg.duration)
      throw std::invalid_argument("config: capacity change time out of range");
    if (!(cc.cpu_factor > 0.0) || !std::isfinite(cc.cpu_factor))
      throw std::invalid_argument("config: capacity factor must be > 0");
  }
}

double Engine::TaskState::remaining_cpu() const {
  double s = 0.0;
  if (stage < rec.stages.size() && rec.stages[stage].queue == QueueKind::cpu)
    s += std::max(residual, 0.0);
  for (std::size_t k = stage + 1; k < rec.stages.size(); ++k)
    if (rec.stages[k].queue == QueueKind::cpu) s += rec.stages[k].work;
  return s;
}

double Engine::TaskState::remaining_io() const {
  double s = 0.0;
  if (stage < rec.stages.size() && rec.stages[stage].queue == QueueKind::io)
    s += std::max(residual, 0.0);
  for (std::size_t k = stage + 1; k < rec.stages.size(); ++k)
    if (rec.stages[k].queue == QueueKind::io) s += rec.stages[k].work;
  return s;
}

Engine::Engine(EpisodeConfig cfg, std::vector<std::shared_ptr<AgentPolicy>> policies,
               std::uint64_t seed)
    : cfg_(std::move(cfg)),
      policies_(std::move(policies)),
      seed_(seed),
      latency_rng_(seed, "latency") {
  validate(cfg_);
  if (policies_.size() != cfg_.n_agents)
    throw std::invalid_argument("engine: one policy per agent required");
  for (const auto& p : policies_)
    if (!p) throw std::invalid_argument("engine: null policy");

  const std::size_t n = cfg_.servers.size();
  servers_.resize(n);
  for (std::size_t j = 0; j < n; ++j) servers_[j].spec = cfg_.servers[j];

  scaling_.count_scale.resize(n);
  for (std::size_t j = 0; j < n; ++j)
    scaling_.count_scale[j] = 1.0 / static_cast<double>(cfg_.servers[j].cpu_cap);
  scaling_.time_scale = cfg_.obs_time_scale;

  for (std::size_t i = 0; i < cfg_.n_agents; ++i) {
    channels_.emplace_back(n, cfg_.reservoir_duration, cfg_.reservoir_tct,
                           cfg_.reservoir_arrival);
    policy_rng_.emplace_back(seed, "policy", i);
    reservoir_rng_.emplace_back(seed, "reservoir", i);
  }
  last_arrival_.assign(cfg_.n_agents, 0.0);

  const auto arrivals =
      generate_arrivals(cfg_.profile, cfg_.n_agents, cfg_.duration, seed);
  std::size_t total = 0;
  for (const auto& per_agent : arrivals) total += per_agent.size();
  tasks_.resize(total);
  for (const auto& per_agent : arrivals)
    for (const auto& rec : per_agent) {
      TaskState ts;
      ts.rec = rec;
      tasks_[static_cast<std::size_t>(rec.id)] = std::move(ts);
    }
  for (const auto& ts : tasks_)
    push({ts.rec.t_arrival, EventKind::task_arrival_at_agent, 0, ts.rec.id});

  for (const auto& cc : cfg_.capacity_changes)
    push({cc.time, EventKind::capacity_change, 0, -1, cc.server, QueueKind::cpu, 0,
          cc.cpu_factor});

  push({0.0, EventKind::decision_tick, 0, -1, -1, QueueKind::cpu, 0, 0.0});
  push({cfg_.duration, EventKind::episode_end, 0});

  // Stability advisory; the episode still runs.
  double cpu_capacity = 0.0, io_capacity = 0.0;
  for (const auto& s : cfg_.servers) {
    cpu_capacity += s.rate * s.cpu_count;
    io_capacity += s.io_capable ? 1.0 : 0.0;
  }
  const double cpu_offered = cfg_.profile.rate * mean_cpu_work(cfg_.profile);
  const double io_offered = cfg_.profile.rate * mean_io_work(cfg_.profile);
  std::ostringstream os;
  if (cpu_offered > cpu_capacity) {
    os << "offered CPU work " << cpu_offered << "/s exceeds capacity " << cpu_capacity
       << "/s";
    trace_.warnings.push_back(os.str());
    os.str("");
  }
  if (io_offered > io_capacity) {
    os << "offered IO work " << io_offered << "/s exceeds capacity " << io_capacity
       << "/s";
    trace_.warnings.push_back(os.str());
  }
}

void Engine::push(SimEvent ev) {
  ev.seq = next_seq_++;
  queue_.push(ev);
}

void Engine::schedule_capacity_change(const CapacityChange& change) {
  if (ran_) throw std::logic_error("engine: episode already ran");
  if (change.server < 0 || change.server >= static_cast<int>(servers_.size()))
    throw std::invalid_argument("capacity change: server out of range");
  if (change.time < 0.0 || change.time > cfg_.duration)
    throw std::invalid_argument("capacity change: time out of range");
  if (!(change.cpu_factor > 0.0))
    throw std::invalid_argument("capacity change: factor must be > 0");
  push({change.time, EventKind::capacity_change, 0, -1, change.server, QueueKind::cpu,
        0, change.cpu_factor});
}

void Engine::advance(std::size_t j, double now) {
  auto& rt = servers_[j];
  const double dt = now - rt.last_advance;
  if (dt <= 0.0) return;
  if (!rt.cpu_active.empty()) {
    const double per =
        cpu_speed_per_task(rt.cpu_present(), rt.spec.cpu_count, rt.spec.cpu_cap) *
        rt.spec.rate * rt.capacity_factor;
    for (int id : rt.cpu_active) {
      tasks_[id].residual -= dt * per;
      tasks_[id].integrated += dt * per;
    }
  }
  if (!rt.io_active.empty()) {
    const double per = io_speed_per_task(static_cast<int>(rt.io_active.size()));
    for (int id : rt.io_active) {
      tasks_[id].residual -= dt * per;
      tasks_[id].integrated += dt * per;
    }
  }
  rt.last_advance = now;
}

void Engine::advance_all(double now) {
  for (std::size_t j = 0; j < servers_.size(); ++j) advance(j, now);
}

void Engine::schedule_cpu_completion(std::size_t j, double now) {
  auto& rt = servers_[j];
  if (rt.cpu_active.empty()) return;
  const double per =
      cpu_speed_per_task(rt.cpu_present(), rt.spec.cpu_count, rt.spec.cpu_cap) *
      rt.spec.rate * rt.capacity_factor;
  double best = std::numeric_limits<double>::infinity();
  for (int id : rt.cpu_active) best = std::min(best, tasks_[id].residual);
  push({now + std::max(best, 0.0) / per, EventKind::stage_complete, 0, -1,
        static_cast<int>(j), QueueKind::cpu, rt.cpu_epoch});
}

void Engine::schedule_io_completion(std::size_t j, double now) {
  auto& rt = servers_[j];
  if (rt.io_active.empty()) return;
  const double per = io_speed_per_task(static_cast<int>(rt.io_active.size()));
  double best = std::numeric_limits<double>::infinity();
  for (int id : rt.io_active) best = std::min(best, tasks_[id].residual);
  push({now + std::max(best, 0.0) / per, EventKind::stage_complete, 0, -1,
        static_cast<int>(j), QueueKind::io, rt.io_epoch});
}

void Engine::enter_service(TaskState& ts, std::size_t j, QueueKind q, double now) {
  auto& rt = servers_[j];
  if (q == QueueKind::cpu) {
    if (rt.cpu_present() >= rt.spec.cpu_cap)
      throw std::logic_error("engine: CPU admission over cap");
    rt.cpu_active.push_back(ts.rec.id);
    rt.cpu_epoch++;
    ts.phase = TaskState::Phase::cpu_active;
  } else {
    rt.io_active.push_back(ts.rec.id);
    rt.io_epoch++;
    ts.phase = TaskState::Phase::io_active;
  }
  if (ts.t_first_service < 0.0) {
    ts.t_first_service = now;
    push({now + latency_rng_.uniform(cfg_.latency.lo, cfg_.latency.hi),
          EventKind::first_response_at_agent, 0, ts.rec.id, static_cast<int>(j)});
  }
  if (q == QueueKind::cpu)
    schedule_cpu_completion(j, now);
  else
    schedule_io_completion(j, now);
}

void Engine::promote_waiters(std::size_t j, double now) {
  auto& rt = servers_[j];
  while (rt.cpu_present() < rt.spec.cpu_cap) {
    int id;
    if (!rt.cpu_wait.empty()) {
      id = rt.cpu_wait.front();
      rt.cpu_wait.pop_front();
    } else if (!rt.backlog.empty()) {
      id = rt.backlog.front();
      rt.backlog.pop_front();
    } else {
      break;
    }
    enter_service(tasks_[id], j, QueueKind::cpu, now);
  }
}

void Engine::finish_task(TaskState& ts, double now) {
  ts.phase = TaskState::Phase::done;
  ts.t_completed = now;
  push({now + latency_rng_.uniform(cfg_.latency.lo, cfg_.latency.hi),
        EventKind::completion_at_agent, 0, ts.rec.id, ts.server});
}

void Engine::complete_stage(TaskState& ts, std::size_t j, QueueKind q, double now) {
  auto& rt = servers_[j];
  const double nominal = ts.rec.stages[ts.stage].work;
  const double err = std::abs(ts.integrated - nominal) / std::max(nominal, 1e-12);
  trace_.max_stage_work_error = std::max(trace_.max_stage_work_error, err);

  if (q == QueueKind::cpu) {
    erase_id(rt.cpu_active, ts.rec.id);
    rt.cpu_epoch++;
  } else {
    erase_id(rt.io_active, ts.rec.id);
    rt.io_epoch++;
  }

  ts.stage++;
  if (ts.stage == ts.rec.stages.size()) {
    finish_task(ts, now);
  } else {
    const auto& next = ts.rec.stages[ts.stage];
    ts.residual = next.work;
    ts.integrated = 0.0;
    if (next.queue == QueueKind::io) {
      enter_service(ts, j, QueueKind::io, now);
    } else if (rt.cpu_present() < rt.spec.cpu_cap) {
      enter_service(ts, j, QueueKind::cpu, now);
    } else {
      // Mid-task re-entry holds a place ahead of fresh arrivals and is never
      // rejected; the backlog bound applies to new tasks only.
      ts.phase = TaskState::Phase::cpu_wait;
      rt.cpu_wait.push_back(ts.rec.id);
    }
  }
  if (q == QueueKind::cpu) promote_waiters(j, now);
}

void Engine::handle_arrival_at_agent(const SimEvent& ev) {
  auto& ts = tasks_[ev.task];
  const std::size_t i = static_cast<std::size_t>(ts.rec.agent);
  channels_[i].interarrival.insert({ev.t, ev.t - last_arrival_[i]},
                                   reservoir_rng_[i]);
  last_arrival_[i] = ev.t;

  const std::size_t j = policies_[i]->pick_server(
      PickView{i, ev.t, channels_[i].ongoing, ts.rec, policy_rng_[i], *this});
  if (j >= servers_.size())
    throw std::runtime_error("policy picked a server out of range");

  ts.server = static_cast<int>(j);
  ts.phase = TaskState::Phase::wire;
  ts.stage = 0;
  ts.residual = ts.rec.stages[0].work;
  ts.integrated = 0.0;
  channels_[i].ongoing[j]++;
  servers_[j].wire.push_back(ts.rec.id);
  generated_++;
  in_system_.insert(ts.rec.id);
  push({ev.t + latency_rng_.uniform(cfg_.latency.lo, cfg_.latency.hi),
        EventKind::task_arrival_at_server, 0, ts.rec.id, static_cast<int>(j)});
}

void Engine::handle_arrival_at_server(const SimEvent& ev) {
  auto& ts = tasks_[ev.task];
  const std::size_t j = static_cast<std::size_t>(ev.server);
  advance(j, ev.t);
  erase_id(servers_[j].wire, ts.rec.id);

  switch (admit_or_reject(servers_[j], ts.rec.stages[0].queue, cfg_.backlog_limit)) {
    case Admission::service:
      enter_service(ts, j, ts.rec.stages[0].queue, ev.t);
      break;
    case Admission::queued:
      ts.phase = TaskState::Phase::backlog;
      servers_[j].backlog.push_back(ts.rec.id);
      break;
    case Admission::rejected:
      ts.phase = TaskState::Phase::rejected;
      push({ev.t + latency_rng_.uniform(cfg_.latency.lo, cfg_.latency.hi),
            EventKind::completion_at_agent, 0, ts.rec.id, ev.server, QueueKind::cpu,
            0, 1.0});
      break;
  }
}

void Engine::handle_stage_complete(const SimEvent& ev) {
  const std::size_t j = static_cast<std::size_t>(ev.server);
  auto& rt = servers_[j];
  const std::uint64_t current =
      ev.queue == QueueKind::cpu ? rt.cpu_epoch : rt.io_epoch;
  if (ev.epoch != current) return;  // superseded by a later membership change

  advance(j, ev.t);
  const auto& lst = ev.queue == QueueKind::cpu ? rt.cpu_active : rt.io_active;
  std::vector<int> finished;
  for (int id : lst)
    if (tasks_[id].residual <= kCompleteEps) finished.push_back(id);
  std::sort(finished.begin(), finished.end());
  for (int id : finished) complete_stage(tasks_[id], j, ev.queue, ev.t);

  if (ev.queue == QueueKind::cpu)
    schedule_cpu_completion(j, ev.t);
  else
    schedule_io_completion(j, ev.t);
}

void Engine::handle_first_response(const SimEvent& ev) {
  const auto& ts = tasks_[ev.task];
  const std::size_t i = static_cast<std::size_t>(ts.rec.agent);
  channels_[i].duration[ts.server].insert({ev.t, ev.t - ts.rec.t_arrival},
                                          reservoir_rng_[i]);
}

void Engine::handle_completion_at_agent(const SimEvent& ev) {
  auto& ts = tasks_[ev.task];
  const std::size_t i = static_cast<std::size_t>(ts.rec.agent);
  const std::size_t j = static_cast<std::size_t>(ts.server);
  if (--channels_[i].ongoing[j] < 0)
    throw std::logic_error("engine: ongoing count went negative");

  TaskOutcome out;
  out.id = ts.rec.id;
  out.agent = ts.rec.agent;
  out.server = ts.server;
  out.t_arrival = ts.rec.t_arrival;
  if (ev.value > 0.5) {
    out.rejected = true;
    out.fct = cfg_.reject_timeout;
    rejected_++;
  } else {
    out.fct = ts.t_completed - ts.rec.t_arrival;
    completed_++;
    channels_[i].tct[j].insert({ev.t, ev.t - ts.rec.t_arrival}, reservoir_rng_[i]);
  }
  trace_.outcomes.push_back(out);
  in_system_.erase(ts.rec.id);
}

double Engine::agent_reward(std::size_t i, double now, std::vector<double>& avg_out) {
  auto& ch = channels_[i];
  avg_out.assign(ch.n_servers, 0.0);
  for (std::size_t j = 0; j < ch.n_servers; ++j) {
    if (!ch.duration[j].empty()) {
      ch.last_duration_avg[j] =
          obs::reduce_stats(ch.duration[j].samples(), now, cfg_.stats_decay)
              .discounted;
    }
    avg_out[j] = ch.last_duration_avg[j];
  }
  return lb::reward(cfg_.reward_kind, avg_out);
}

void Engine::compute_load(double /*now*/, lb::LoadVector& load,
                          lb::PerAgentLoad& split) {
  const std::size_t n = servers_.size();
  load.assign(n, 0.0);
  split = lb::PerAgentLoad(cfg_.n_agents, n);
  for (std::size_t j = 0; j < n; ++j) {
    auto& rt = servers_[j];
    const int committed = static_cast<int>(rt.cpu_active.size() + rt.cpu_wait.size() +
                                           rt.backlog.size() + rt.wire.size());
    const double cpu_drain =
        rt.spec.rate * rt.capacity_factor * drain_parallelism(rt, committed);
    const auto account = [&](int id) {
      const auto& ts = tasks_[id];
      split.at(static_cast<std::size_t>(ts.rec.agent), j) +=
          ts.remaining_cpu() / cpu_drain + ts.remaining_io();  // io drains at 1
    };
    for (int id : rt.cpu_active) account(id);
    for (int id : rt.cpu_wait) account(id);
    for (int id : rt.backlog) account(id);
    for (int id : rt.wire) account(id);
    for (int id : rt.io_active) account(id);
  }
  for (std::size_t i = 0; i < cfg_.n_agents; ++i)
    for (std::size_t j = 0; j < n; ++j) load[j] += split.at(i, j);
}

lb::LoadVector Engine::remaining_time_vector(double now) {
  advance_all(now);
  lb::LoadVector load;
  lb::PerAgentLoad split;
  compute_load(now, load, split);
  return load;
}

double Engine::remaining_time_with(std::size_t server, const TaskRecord& task,
                                   double now) {
  if (server >= servers_.size())
    throw std::invalid_argument("remaining_time_with: server out of range");
  advance(server, now);
  auto& rt = servers_[server];
  const int committed = static_cast<int>(rt.cpu_active.size() + rt.cpu_wait.size() +
                                         rt.backlog.size() + rt.wire.size());
  double cpu_work = task.cpu_work();
  double io_work = task.io_work();
  const auto account = [&](int id) {
    cpu_work += tasks_[id].remaining_cpu();
    io_work += tasks_[id].remaining_io();
  };
  for (int id : rt.cpu_active) account(id);
  for (int id : rt.cpu_wait) account(id);
  for (int id : rt.backlog) account(id);
  for (int id : rt.wire) account(id);
  for (int id : rt.io_active) account(id);
  const double cpu_drain =
      rt.spec.rate * rt.capacity_factor * drain_parallelism(rt, committed + 1);
  return cpu_work / cpu_drain + io_work;
}

double Engine::completion_time_estimate(std::size_t server, const TaskRecord& task,
                                        double now) {
  if (server >= servers_.size())
    throw std::invalid_argument("completion_time_estimate: server out of range");
  advance(server, now);
  auto& rt = servers_[server];

  struct Item {
    QueueKind queue;
    double residual = 0.0;
    std::vector<TaskStage> rest;
    bool target = false;
  };
  std::vector<Item> items;
  std::vector<std::size_t> cpu_act, io_act;
  std::deque<std::size_t> wait, back;

  const auto snapshot = [&](int id) {
    const auto& ts = tasks_[id];
    Item it;
    it.queue = ts.rec.stages[ts.stage].queue;
    it.residual = std::max(ts.residual, 0.0);
    it.rest.assign(ts.rec.stages.begin() + ts.stage + 1, ts.rec.stages.end());
    items.push_back(std::move(it));
    return items.size() - 1;
  };
  for (int id : rt.cpu_active) cpu_act.push_back(snapshot(id));
  for (int id : rt.io_active) io_act.push_back(snapshot(id));
  for (int id : rt.cpu_wait) wait.push_back(snapshot(id));
  for (int id : rt.backlog) back.push_back(snapshot(id));
  // In-flight tasks land within a hop; treat them as already queued.
  for (int id : rt.wire) {
    const std::size_t k = snapshot(id);
    if (items[k].queue == QueueKind::io)
      io_act.push_back(k);
    else if (static_cast<int>(cpu_act.size()) < rt.spec.cpu_cap)
      cpu_act.push_back(k);
    else
      back.push_back(k);
  }

  Item fresh;
  fresh.queue = task.stages.front().queue;
  fresh.residual = task.stages.front().work;
  fresh.rest.assign(task.stages.begin() + 1, task.stages.end());
  fresh.target = true;
  items.push_back(std::move(fresh));
  const std::size_t target = items.size() - 1;
  if (items[target].queue == QueueKind::io) {
    io_act.push_back(target);
  } else if (static_cast<int>(cpu_act.size()) < rt.spec.cpu_cap) {
    cpu_act.push_back(target);
  } else if (static_cast<int>(back.size()) < cfg_.backlog_limit) {
    back.push_back(target);
  } else {
    return 10.0 * cfg_.reject_timeout;  // would be rejected outright
  }

  const double rate = rt.spec.rate * rt.capacity_factor;
  double clock = 0.0;
  for (int guard = 0; guard < 100000; ++guard) {
    const double per_cpu =
        cpu_speed_per_task(static_cast<int>(cpu_act.size()), rt.spec.cpu_count,
                           rt.spec.cpu_cap) *
        rate;
    const double per_io = io_speed_per_task(static_cast<int>(io_act.size()));
    double dt = std::numeric_limits<double>::infinity();
    for (std::size_t k : cpu_act) dt = std::min(dt, items[k].residual / per_cpu);
    for (std::size_t k : io_act) dt = std::min(dt, items[k].residual / per_io);
    if (!std::isfinite(dt)) throw std::logic_error("estimate: no progress");
    clock += dt;
    for (std::size_t k : cpu_act) items[k].residual -= dt * per_cpu;
    for (std::size_t k : io_act) items[k].residual -= dt * per_io;

    const auto finish_from = [&](std::vector<std::size_t>& act) {
      for (std::size_t pos = 0; pos < act.size();) {
        const std::size_t k = act[pos];
        if (items[k].residual > kCompleteEps) {
          ++pos;
          continue;
        }
        act[pos] = act.back();
        act.pop_back();
        auto& it = items[k];
        if (it.rest.empty()) {
          if (it.target) return true;
          continue;
        }
        it.queue = it.rest.front().queue;
        it.residual = it.rest.front().work;
        it.rest.erase(it.rest.begin());
        if (it.queue == QueueKind::io)
          io_act.push_back(k);
        else
          wait.push_front(k);  // re-entries go ahead of fresh arrivals
      }
      return false;
    };
    if (finish_from(cpu_act)) return clock;
    if (finish_from(io_act)) return clock;

    while (static_cast<int>(cpu_act.size()) < rt.spec.cpu_cap) {
      if (!wait.empty()) {
        cpu_act.push_back(wait.front());
        wait.pop_front();
      } else if (!back.empty()) {
        cpu_act.push_back(back.front());
        back.pop_front();
      } else {
        break;
      }
    }
    if (cpu_act.empty() && io_act.empty()) break;
  }
  return clock + 10.0 * cfg_.reject_timeout;  // guard tripped, keep it unattractive
}

void Engine::record_tick(std::size_t index, double t, bool final_tick) {
  advance_all(t);
  TickLog log;
  log.index = index;
  log.t = t;
  compute_load(t, log.load, log.split);

  const std::size_t m = cfg_.n_agents;
  log.obs.resize(m);
  log.action.resize(m);
  log.reward.assign(m, 0.0);
  log.reward_input.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> avg;
    const double r = agent_reward(i, t, avg);
    log.reward_input[i] = std::move(avg);
    log.reward[i] = index == 0 ? 0.0 : r;
    log.obs[i] = obs::build_observation(channels_[i], t, scaling_, cfg_.stats_decay);
  }
  // Observations are frozen above before any policy acts on them.
  for (std::size_t i = 0; i < m; ++i) {
    if (!final_tick) {
      policies_[i]->on_tick(TickView{i, index, t, log.obs[i], log.reward[i],
                                     index == 0});
      if (const auto* a = policies_[i]->current_action()) {
        if (a->size() != servers_.size())
          throw std::runtime_error("policy action has wrong size");
        channels_[i].prev_action = *a;
      }
    } else {
      policies_[i]->end_episode(EndView{i, t, log.obs[i], log.reward[i]});
    }
    log.action[i] = channels_[i].prev_action;
  }

  log.generated = generated_;
  log.completed = completed_;
  log.rejected = rejected_;
  log.in_flight = generated_ - completed_ - rejected_;
  if (static_cast<long long>(in_system_.size()) != log.in_flight)
    throw std::logic_error("engine: conservation audit failed");
  trace_.ticks.push_back(std::move(log));
}

void Engine::handle_tick(const SimEvent& ev) {
  const std::size_t index = trace_.ticks.size();
  record_tick(index, ev.t, false);
  const double next_t = static_cast<double>(index + 1) * cfg_.tick;
  if (next_t < cfg_.duration - 1e-12)
    push({next_t, EventKind::decision_tick, 0});
}

SimTrace Engine::run() {
  if (ran_) throw std::logic_error("engine: run() already called");
  ran_ = true;
  for (std::size_t i = 0; i < cfg_.n_agents; ++i)
    policies_[i]->begin_episode(i, cfg_);

  while (!queue_.empty()) {
    const SimEvent ev = queue_.top();
    queue_.pop();
    switch (ev.kind) {
      case EventKind::capacity_change: {
        const std::size_t j = static_cast<std::size_t>(ev.server);
        advance(j, ev.t);
        servers_[j].capacity_factor = ev.value;
        servers_[j].cpu_epoch++;
        schedule_cpu_completion(j, ev.t);
        break;
      }
      case EventKind::stage_complete:
        handle_stage_complete(ev);
        break;
      case EventKind::task_arrival_at_server:
        handle_arrival_at_server(ev);
        break;
      case EventKind::first_response_at_agent:
        handle_first_response(ev);
        break;
      case EventKind::completion_at_agent:
        handle_completion_at_agent(ev);
        break;
      case EventKind::task_arrival_at_agent:
        handle_arrival_at_agent(ev);
        break;
      case EventKind::decision_tick:
        handle_tick(ev);
        break;
      case EventKind::episode_end: {
        record_tick(trace_.ticks.size(), ev.t, true);
        trace_.generated = generated_;
        trace_.completed = completed_;
        trace_.rejected = rejected_;
        trace_.unfinished = static_cast<long long>(in_system_.size());
        return std::move(trace_);
      }
    }
  }
  throw std::logic_error("engine: event queue drained before episode end");
}

std::vector<double> SimTrace::fct_values() const {
  std::vector<double> out;
  out.reserve(outcomes.size());
  for (const auto& o : outcomes) out.push_back(o.fct);
  return out;
}

std::uint64_t SimTrace::hash() const {
  HashAccumulator acc;
  for (const auto& tk : ticks) {
    acc.add(static_cast<std::uint64_t>(tk.index));
    acc.add(tk.t);
    for (double v : tk.load) acc.add(v);
    for (double v : tk.split.cells) acc.add(v);
    for (const auto& o : tk.obs)
      for (double v : o) acc.add(v);
    for (const auto& a : tk.action)
      for (double v : a) acc.add(v);
    for (double v : tk.reward) acc.add(v);
    for (const auto& ri : tk.reward_input)
      for (double v : ri) acc.add(v);
    acc.add(static_cast<std::uint64_t>(tk.generated));
    acc.add(static_cast<std::uint64_t>(tk.completed));
    acc.add(static_cast<std::uint64_t>(tk.rejected));
  }
  for (const auto& o : outcomes) {
    acc.add(static_cast<std::uint64_t>(o.id));
    acc.add(static_cast<std::uint64_t>(o.agent));
    acc.add(static_cast<std::uint64_t>(o.server + 1));
    acc.add(o.t_arrival);
    acc.add(o.fct);
    acc.add(static_cast<std::uint64_t>(o.rejected ? 1 : 0));
  }
  for (const auto& w : warnings) acc.add(w);
  acc.add(max_stage_work_error);
  return acc.h;
}

SimTrace run_episode(const EpisodeConfig& cfg,
                     const std::vector<std::shared_ptr<AgentPolicy>>& policies,
                     std::uint64_t seed) {
  Engine engine(cfg, policies, seed);
  return engine.run();
}

}  // namespace marllb::sim
