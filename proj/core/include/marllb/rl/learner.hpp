#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "marllb/nn/layers.hpp"
#include "marllb/nn/optim.hpp"
#include "marllb/nn/tensor.hpp"
#include "marllb/rl/replay.hpp"
#include "marllb/rng.hpp"

namespace marllb::rl {

// obs -> dense+tanh -> recurrent cell -> mean and log_std heads
struct ActorNet {
  std::size_t obs_dim = 0, n_actions = 0, hidden = 0;
  nn::DenseParams input;
  nn::GruParams gru;
  nn::DenseParams mean_head;
  nn::DenseParams log_std_head;

  static ActorNet make(std::size_t obs_dim, std::size_t n_actions,
                       std::size_t hidden, Rng& rng);
  std::vector<nn::Tensor*> tensors();
  std::vector<nn::NamedTensor> named(const std::string& prefix);

  struct StepCache {
    std::vector<double> obs, act1;
    nn::GruCache gru;
    std::vector<double> h, mean, log_std;
  };
  struct StepOut {
    std::vector<double> h, mean, log_std;
  };
  StepOut step(const std::vector<double>& obs, const std::vector<double>& h,
               StepCache* cache = nullptr) const;
  // Returns dL/dh_prev given head gradients and dL/dh flowing from later steps.
  std::vector<double> step_backward(const StepCache& cache,
                                    const std::vector<double>& dmean,
                                    const std::vector<double>& dlog_std,
                                    const std::vector<double>& dh_out);
};

// (obs, raw action) -> dense+tanh -> recurrent cell -> scalar value
struct CriticNet {
  std::size_t obs_dim = 0, n_actions = 0, hidden = 0;
  nn::DenseParams input;
  nn::GruParams gru;
  nn::DenseParams value;

  static CriticNet make(std::size_t obs_dim, std::size_t n_actions,
                        std::size_t hidden, Rng& rng);
  std::vector<nn::Tensor*> tensors();
  std::vector<nn::NamedTensor> named(const std::string& prefix);

  struct StepCache {
    std::vector<double> in, act1;
    nn::GruCache gru;
    std::vector<double> h;
  };
  struct StepOut {
    std::vector<double> h;
    double q = 0.0;
  };
  StepOut step(const std::vector<double>& obs, const std::vector<double>& act,
               const std::vector<double>& h, StepCache* cache = nullptr) const;
  // Returns dL/dh_prev; when dact is given, also writes dL/d(action input).
  std::vector<double> step_backward(const StepCache& cache, double dq,
                                    const std::vector<double>& dh_out,
                                    std::vector<double>* dact = nullptr);
};

struct LearnerConfig {
  std::size_t obs_dim = 0;
  std::size_t n_actions = 0;
  std::size_t hidden = 64;
  double lr = 3e-4;
  double gamma = 0.99;
  double tau = 0.005;
  double alpha_init = 0.2;
  // NaN means the default -n_actions
  double target_entropy = std::numeric_limits<double>::quiet_NaN();
  std::size_t batch_size = 25;
  std::size_t burn_in = 4;   // detached zero-init prefix of each sequence
  std::size_t train_len = 4;  // loss-bearing steps after the burn-in
  std::size_t replay_capacity = 3000;
  bool single_critic = false;
  double action_floor = 1e-3;

  std::size_t seq_len() const { return burn_in + train_len; }
  void validate() const;
};

// One agent's full soft actor-critic state: recurrent actor, twin critics
// with soft targets, learned temperature, own replay buffer, own RNG streams.
// Nothing here reads another agent's state.
class AgentLearner {
 public:
  AgentLearner(LearnerConfig cfg, std::uint64_t run_seed,
               std::size_t agent_index);

  const LearnerConfig& config() const { return cfg_; }
  std::size_t agent_index() const { return agent_; }

  void begin_rollout();
  std::uint64_t episode_index() const { return episode_; }
  // Raw action in (-1,1)^N; advances the rollout hidden state. Non-finite
  // network output falls back to the uniform raw action and counts an
  // incident.
  std::vector<double> act(const std::vector<double>& obs, bool deterministic);
  std::size_t act_incidents() const { return act_incidents_; }

  static std::vector<double> weights_from_raw(const std::vector<double>& raw,
                                              double floor);

  ReplayBuffer& buffer() { return buffer_; }
  const ReplayBuffer& buffer() const { return buffer_; }

  struct SeqBatch {
    std::vector<std::vector<const TransitionRecord*>> seqs;
    // frozen noise per [sequence][train step][coordinate]
    std::vector<std::vector<std::vector<double>>> next_noise;
    std::vector<std::vector<std::vector<double>>> cur_noise;
  };
  bool can_update() const;
  SeqBatch draw_batch();

  // Pure loss evaluations with the batch's frozen noise; no gradients move.
  // Burn-in steps warm the recurrent state with current parameters but are
  // excluded from backpropagation, so with burn_in > 0 the analytic gradient
  // is the truncated-unroll one, not the full derivative of these values.
  double critic_loss(const SeqBatch& batch);
  double actor_loss(const SeqBatch& batch);
  // Bootstrapped regression targets per [sequence][train step].
  std::vector<std::vector<double>> td_targets(const SeqBatch& batch);

  // Backward passes that only accumulate gradients, for checking.
  double critic_backward(const SeqBatch& batch);
  double actor_backward(const SeqBatch& batch);

  // Gradient steps; each zeroes the gradients it is about to write first.
  double critic_update(const SeqBatch& batch);
  double actor_update(const SeqBatch& batch);
  double temperature_update(const SeqBatch& batch);
  void update_targets();

  struct UpdateStats {
    double critic_loss = 0.0;
    double actor_loss = 0.0;
    double alpha = 0.0;
    bool ran = false;
  };
  UpdateStats update_once();

  double alpha() const;
  ActorNet& actor() { return actor_; }
  CriticNet& critic1() { return critic1_; }
  CriticNet& critic2() { return critic2_; }
  CriticNet& target1() { return target1_; }
  CriticNet& target2() { return target2_; }
  nn::Tensor& log_alpha() { return log_alpha_; }

  // Everything a checkpoint carries, in a stable order.
  std::vector<nn::NamedTensor> named_tensors();

 private:
  struct ActorSeqEval;
  double critic_pass(const SeqBatch& batch, bool grad,
                     std::vector<std::vector<double>>* targets_out);
  double actor_pass(const SeqBatch& batch, bool grad);
  double mean_train_log_prob(const SeqBatch& batch);

  LearnerConfig cfg_;
  std::size_t agent_ = 0;
  ActorNet actor_;
  CriticNet critic1_, critic2_, target1_, target2_;
  nn::Tensor log_alpha_;
  nn::AdamOptimizer actor_opt_, critic_opt_, alpha_opt_;
  ReplayBuffer buffer_;
  Rng policy_rng_, train_rng_;
  std::vector<double> rollout_hidden_;
  std::uint64_t episode_ = 0;
  std::size_t act_incidents_ = 0;
};

}  // namespace marllb::rl
