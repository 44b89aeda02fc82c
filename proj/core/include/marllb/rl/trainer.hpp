#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "marllb/rl/learner.hpp"
#include "marllb/sim/engine.hpp"

namespace marllb::rl {

// Engine-side adapter: applies the learner's weights through the same
// dispatch rule every weighted policy uses, and when recording is on, turns
// tick observations and rewards into replay transitions.
class RlDispatchPolicy : public sim::AgentPolicy {
 public:
  RlDispatchPolicy(std::shared_ptr<AgentLearner> learner, bool deterministic,
                   bool record);

  void begin_episode(std::size_t agent, const sim::EpisodeConfig& cfg) override;
  void on_tick(const sim::TickView& view) override;
  std::size_t pick_server(const sim::PickView& view) override;
  void end_episode(const sim::EndView& view) override;
  const std::vector<double>* current_action() const override;

 private:
  void push_transition(double reward, const std::vector<double>& next_obs);
  void take_action(const std::vector<double>& obs);

  std::shared_ptr<AgentLearner> learner_;
  bool deterministic_;
  bool record_;
  std::vector<double> weights_;
  std::vector<double> held_obs_, held_raw_, held_prev_raw_;
  bool has_held_ = false;
  std::size_t step_ = 0;
};

struct TrainerConfig {
  sim::EpisodeConfig episode;
  LearnerConfig learner;  // obs_dim and n_actions are filled from the episode
  std::size_t episodes = 500;
  std::size_t updates_per_episode = 10;
  std::uint64_t seed = 1;
};

struct CurveRow {
  std::size_t episode = 0;
  std::size_t agent = 0;
  double mean_reward = 0.0;
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double alpha = 0.0;
};

class Trainer {
 public:
  explicit Trainer(TrainerConfig cfg);

  // One rollout episode followed by the per-agent update iterations.
  sim::SimTrace run_episode();
  void run();

  const TrainerConfig& config() const { return cfg_; }
  const std::vector<CurveRow>& curve() const { return curve_; }
  std::vector<std::shared_ptr<AgentLearner>>& learners() { return learners_; }
  std::size_t episodes_done() const { return episodes_done_; }

  void save_checkpoints(const std::string& dir,
                        std::uint64_t config_hash) const;
  // Returns the config hash stored in the first agent's checkpoint.
  std::uint64_t load_checkpoints(const std::string& dir);
  static std::string checkpoint_path(const std::string& dir, std::size_t agent);

  void write_curve_csv(const std::string& path) const;

 private:
  TrainerConfig cfg_;
  std::vector<std::shared_ptr<AgentLearner>> learners_;
  std::size_t episodes_done_ = 0;
  std::vector<CurveRow> curve_;
};

// Fills obs_dim, n_actions and the default target entropy from the episode
// shape; shared by the trainer and standalone evaluation.
LearnerConfig resolve_learner_config(LearnerConfig base,
                                     const sim::EpisodeConfig& episode);

struct NeGapEntry {
  std::string deviation;
  double mean_diff = 0.0;  // deviation return minus joint return
  double ci_half = 0.0;    // 1.96 * sd / sqrt(n) of the paired differences
};

struct NeGapAgentReport {
  std::size_t agent = 0;
  double joint_value = 0.0;
  double joint_ci_half = 0.0;
  std::vector<NeGapEntry> deviations;
  double gap = 0.0;      // largest mean improvement any deviation achieves
  double gap_ci_half = 0.0;
};

// Paired-seed unilateral deviation probe: every run of episode e uses the
// same engine seed, so differences are common-random-number estimates of the
// value change from deviating. Deviations: lsq, sed, uniform weights, and
// each entry of `rivals` (a policy trained elsewhere; may be empty).
std::vector<NeGapAgentReport> ne_gap_probe(
    const sim::EpisodeConfig& episode,
    const std::vector<std::shared_ptr<AgentLearner>>& learners,
    const std::vector<std::shared_ptr<AgentLearner>>& rivals,
    std::size_t episodes, std::uint64_t seed);

}  // namespace marllb::rl
