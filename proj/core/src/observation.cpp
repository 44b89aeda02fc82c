#include "marllb/obs/observation.hpp"

#include <cmath>
#include <stdexcept>

namespace marllb::obs {

AgentChannels::AgentChannels(std::size_t servers, std::size_t res_duration,
                             std::size_t res_tct, std::size_t res_arrival)
    : n_servers(servers),
      ongoing(servers, 0),
      interarrival(res_arrival),
      prev_action(servers, 1.0 / static_cast<double>(servers)),
      last_duration_avg(servers, 0.0) {
  if (servers == 0) throw std::invalid_argument("AgentChannels: no servers");
  duration.reserve(servers);
  tct.reserve(servers);
  for (std::size_t j = 0; j < servers; ++j) {
    duration.emplace_back(res_duration);
    tct.emplace_back(res_tct);
  }
}

std::vector<double> build_observation(const AgentChannels& ch, double now,
                                      const ObservationScaling& scaling,
                                      double decay) {
  if (scaling.count_scale.size() != ch.n_servers)
    throw std::invalid_argument("build_observation: count_scale size mismatch");
  if (!(scaling.time_scale > 0.0))
    throw std::invalid_argument("build_observation: time_scale must be > 0");

  const ObservationLayout layout{ch.n_servers};
  std::vector<double> x(layout.dim(), 0.0);
  const double ts = 1.0 / scaling.time_scale;

  for (std::size_t j = 0; j < ch.n_servers; ++j) {
    std::size_t at = layout.server_offset(j);
    x[at++] = static_cast<double>(ch.ongoing[j]) * scaling.count_scale[j];
    const auto dur = reduce_stats(ch.duration[j].samples(), now, decay).as_array();
    for (double v : dur) x[at++] = v * ts;
    const auto fin = reduce_stats(ch.tct[j].samples(), now, decay).as_array();
    for (double v : fin) x[at++] = v * ts;
  }

  std::size_t at = layout.interarrival_offset();
  const auto arr = reduce_stats(ch.interarrival.samples(), now, decay).as_array();
  for (double v : arr) x[at++] = v * ts;

  at = layout.action_offset();
  for (std::size_t j = 0; j < ch.n_servers; ++j) x[at++] = ch.prev_action[j];

  for (double v : x)
    if (!std::isfinite(v)) throw std::runtime_error("observation has non-finite feature");
  return x;
}

}  // namespace marllb::obs
