#include "marllb/sim/traffic.hpp"

#include <stdexcept>

#include "marllb/rng.hpp"

namespace marllb::sim {

TrafficProfile make_profile(const std::string& name, double cpu_fraction,
                            double rate, double mean_total_work) {
  if (cpu_fraction < 0.0 || cpu_fraction > 1.0)
    throw std::invalid_argument("make_profile: cpu_fraction outside [0, 1]");
  if (!(mean_total_work > 0.0))
    throw std::invalid_argument("make_profile: mean_total_work must be > 0");
  TrafficProfile p;
  p.name = name;
  p.rate = rate;
  p.cpu_fraction = cpu_fraction;
  p.mean_work = mean_total_work;
  p.stages.clear();
  const double cpu = cpu_fraction * mean_total_work;
  const double io = (1.0 - cpu_fraction) * mean_total_work;
  if (io <= 0.0) {
    p.stages.push_back({QueueKind::cpu, cpu});
  } else if (cpu <= 0.0) {
    p.stages.push_back({QueueKind::io, io});
  } else {
    p.stages.push_back({QueueKind::cpu, cpu / 2.0});
    p.stages.push_back({QueueKind::io, io});
    p.stages.push_back({QueueKind::cpu, cpu / 2.0});
  }
  return p;
}

double mean_cpu_work(const TrafficProfile& p) {
  double s = 0.0;
  for (const auto& st : p.stages)
    if (st.queue == QueueKind::cpu) s += st.mean_work;
  return s;
}

double mean_io_work(const TrafficProfile& p) {
  double s = 0.0;
  for (const auto& st : p.stages)
    if (st.queue == QueueKind::io) s += st.mean_work;
  return s;
}

double mean_total_work(const TrafficProfile& p) {
  return mean_cpu_work(p) + mean_io_work(p);
}

double TaskRecord::cpu_work() const {
  double s = 0.0;
  for (const auto& st : stages)
    if (st.queue == QueueKind::cpu) s += st.work;
  return s;
}

double TaskRecord::io_work() const {
  double s = 0.0;
  for (const auto& st : stages)
    if (st.queue == QueueKind::io) s += st.work;
  return s;
}

double TaskRecord::total_work() const { return cpu_work() + io_work(); }

std::vector<std::vector<TaskRecord>> generate_arrivals(const TrafficProfile& profile,
                                                       std::size_t n_agents,
                                                       double duration,
                                                       std::uint64_t seed) {
  if (n_agents == 0) throw std::invalid_argument("generate_arrivals: no agents");
  if (!(duration > 0.0)) throw std::invalid_argument("generate_arrivals: duration must be > 0");
  if (!(profile.rate > 0.0)) throw std::invalid_argument("generate_arrivals: rate must be > 0");
  if (profile.stages.empty())
    throw std::invalid_argument("generate_arrivals: profile has no stages");
  for (const auto& st : profile.stages)
    if (!(st.mean_work > 0.0))
      throw std::invalid_argument("generate_arrivals: stage mean_work must be > 0");

  const double agent_gap_mean = static_cast<double>(n_agents) / profile.rate;
  std::vector<std::vector<TaskRecord>> out(n_agents);
  int next_id = 0;
  for (std::size_t i = 0; i < n_agents; ++i) {
    Rng arrivals(seed, "arrivals", i);
    Rng workloads(seed, "workloads", i);
    double t = arrivals.exponential(agent_gap_mean);
    while (t < duration) {
      TaskRecord rec;
      rec.id = next_id++;
      rec.agent = static_cast<int>(i);
      rec.t_arrival = t;
      rec.stages.reserve(profile.stages.size());
      for (const auto& st : profile.stages)
        rec.stages.push_back({st.queue, workloads.exponential(st.mean_work)});
      out[i].push_back(std::move(rec));
      t += arrivals.exponential(agent_gap_mean);
    }
  }
  return out;
}

}  // namespace marllb::sim
