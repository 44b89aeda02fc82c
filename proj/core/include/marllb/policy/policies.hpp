#pragma once

#include <memory>
#include <string>
#include <vector>

#include "marllb/sim/engine.hpp"

namespace marllb::policy {

enum class Kind { ecmp, wcmp, lsq, sed, oracle, rl };

Kind kind_from_string(const std::string& s);
std::string to_string(Kind k);

// Pure dispatch rules, exposed for direct testing.
std::size_t ecmp_pick(std::size_t n_servers, Rng& rng);
std::size_t wcmp_pick(const std::vector<double>& weights, Rng& rng);
std::size_t lsq_pick(const std::vector<int>& ongoing);
std::size_t sed_pick(const std::vector<int>& ongoing,
                     const std::vector<double>& weights);

// Nominal per-server capacity, the default static weight vector: per-CPU rate
// times CPU count.
std::vector<double> nominal_weights(const std::vector<sim::ServerSpec>& servers);

class EcmpPolicy : public sim::AgentPolicy {
 public:
  std::size_t pick_server(const sim::PickView& view) override;
};

class WcmpPolicy : public sim::AgentPolicy {
 public:
  explicit WcmpPolicy(std::vector<double> weights = {});
  void begin_episode(std::size_t agent, const sim::EpisodeConfig& cfg) override;
  std::size_t pick_server(const sim::PickView& view) override;

 private:
  std::vector<double> configured_;
  std::vector<double> weights_;
};

class LsqPolicy : public sim::AgentPolicy {
 public:
  std::size_t pick_server(const sim::PickView& view) override;
};

class SedPolicy : public sim::AgentPolicy {
 public:
  explicit SedPolicy(std::vector<double> weights = {});
  void begin_episode(std::size_t agent, const sim::EpisodeConfig& cfg) override;
  std::size_t pick_server(const sim::PickView& view) override;

 private:
  std::vector<double> configured_;
  std::vector<double> weights_;
};

// Full-information reference: sends each task where it finishes soonest,
// using simulator-internal remaining-time state no deployable policy sees.
class OraclePolicy : public sim::AgentPolicy {
 public:
  std::size_t pick_server(const sim::PickView& view) override;
};

// Dispatches by argmin (q+1)/w against weights somebody else updates per
// tick; the learning stack plugs its action stream in here.
class WeightedDispatchPolicy : public sim::AgentPolicy {
 public:
  void begin_episode(std::size_t agent, const sim::EpisodeConfig& cfg) override;
  std::size_t pick_server(const sim::PickView& view) override;
  const std::vector<double>* current_action() const override;
  void set_action(std::vector<double> weights);

 private:
  std::vector<double> weights_;
};

// Baseline factory; Kind::rl is not constructible here, the learner owns it.
std::shared_ptr<sim::AgentPolicy> make_baseline(Kind kind,
                                                std::vector<double> weights = {});

}  // namespace marllb::policy
