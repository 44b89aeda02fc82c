#include "marllb/rl/learner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "marllb/nn/gaussian.hpp"

namespace marllb::rl {
namespace {

void add_into(std::vector<double>& acc, const std::vector<double>& inc) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += inc[i];
}

std::vector<double> concat(const std::vector<double>& a,
                           const std::vector<double>& b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

LearnerConfig resolved(LearnerConfig cfg) {
  cfg.validate();
  if (std::isnan(cfg.target_entropy))
    cfg.target_entropy = -static_cast<double>(cfg.n_actions);
  return cfg;
}

ActorNet init_actor(const LearnerConfig& cfg, std::uint64_t seed,
                    std::size_t agent) {
  Rng rng(seed, "init-actor", agent);
  return ActorNet::make(cfg.obs_dim, cfg.n_actions, cfg.hidden, rng);
}

CriticNet init_critic(const LearnerConfig& cfg, std::uint64_t seed,
                      std::size_t agent, std::string_view stream) {
  Rng rng(seed, stream, agent);
  return CriticNet::make(cfg.obs_dim, cfg.n_actions, cfg.hidden, rng);
}

nn::Tensor init_log_alpha(double alpha_init) {
  nn::Tensor t = nn::Tensor::make(1, 1);
  t.v[0] = std::log(alpha_init);
  return t;
}

std::vector<nn::Tensor*> joined_tensors(CriticNet& a, CriticNet& b) {
  std::vector<nn::Tensor*> out = a.tensors();
  for (nn::Tensor* t : b.tensors()) out.push_back(t);
  return out;
}

nn::AdamConfig adam_with_lr(double lr) {
  nn::AdamConfig cfg;
  cfg.lr = lr;
  return cfg;
}

void append_named(std::vector<nn::NamedTensor>& out,
                  std::vector<nn::NamedTensor> part) {
  for (auto& nt : part) out.push_back(std::move(nt));
}

}  // namespace

void LearnerConfig::validate() const {
  if (obs_dim == 0) throw std::invalid_argument("learner: obs_dim must be positive");
  if (n_actions == 0) throw std::invalid_argument("learner: n_actions must be positive");
  if (hidden == 0) throw std::invalid_argument("learner: hidden must be positive");
  if (!(lr > 0.0)) throw std::invalid_argument("learner: lr must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::invalid_argument("learner: gamma must be in [0,1]");
  if (!(tau > 0.0 && tau <= 1.0))
    throw std::invalid_argument("learner: tau must be in (0,1]");
  if (!(alpha_init > 0.0))
    throw std::invalid_argument("learner: alpha_init must be positive");
  if (batch_size == 0) throw std::invalid_argument("learner: batch_size must be positive");
  if (train_len == 0) throw std::invalid_argument("learner: train_len must be positive");
  if (replay_capacity < burn_in + train_len)
    throw std::invalid_argument("learner: replay smaller than one sequence");
  if (!(action_floor >= 0.0) ||
      action_floor * static_cast<double>(n_actions) >= 1.0)
    throw std::invalid_argument("learner: action_floor leaves no simplex mass");
  if (!std::isnan(target_entropy) && !std::isfinite(target_entropy))
    throw std::invalid_argument("learner: target entropy must be finite");
}

ActorNet ActorNet::make(std::size_t obs_dim, std::size_t n_actions,
                        std::size_t hidden, Rng& rng) {
  ActorNet net;
  net.obs_dim = obs_dim;
  net.n_actions = n_actions;
  net.hidden = hidden;
  net.input = nn::make_dense(obs_dim, hidden);
  net.gru = nn::make_gru(hidden, hidden);
  net.mean_head = nn::make_dense(hidden, n_actions);
  net.log_std_head = nn::make_dense(hidden, n_actions);
  nn::init_dense(net.input, rng);
  nn::init_gru(net.gru, rng);
  nn::init_dense(net.mean_head, rng);
  nn::init_dense(net.log_std_head, rng);
  return net;
}

std::vector<nn::Tensor*> ActorNet::tensors() {
  std::vector<nn::Tensor*> out = input.tensors();
  for (nn::Tensor* t : gru.tensors()) out.push_back(t);
  for (nn::Tensor* t : mean_head.tensors()) out.push_back(t);
  for (nn::Tensor* t : log_std_head.tensors()) out.push_back(t);
  return out;
}

std::vector<nn::NamedTensor> ActorNet::named(const std::string& prefix) {
  return {
      {prefix + "input.w", &input.w},       {prefix + "input.b", &input.b},
      {prefix + "gru.update.w", &gru.update.w},
      {prefix + "gru.update.b", &gru.update.b},
      {prefix + "gru.reset.w", &gru.reset.w},
      {prefix + "gru.reset.b", &gru.reset.b},
      {prefix + "gru.cand.w", &gru.candidate.w},
      {prefix + "gru.cand.b", &gru.candidate.b},
      {prefix + "mean.w", &mean_head.w},    {prefix + "mean.b", &mean_head.b},
      {prefix + "logstd.w", &log_std_head.w},
      {prefix + "logstd.b", &log_std_head.b},
  };
}

ActorNet::StepOut ActorNet::step(const std::vector<double>& obs,
                                 const std::vector<double>& h,
                                 StepCache* cache) const {
  if (obs.size() != obs_dim || h.size() != hidden)
    throw std::invalid_argument("actor: step shape mismatch");
  std::vector<double> act1 = nn::dense_forward(input, obs);
  nn::tanh_inplace(act1);
  StepOut out;
  out.h = nn::gru_forward(gru, act1, h, cache ? &cache->gru : nullptr);
  out.mean = nn::dense_forward(mean_head, out.h);
  out.log_std = nn::dense_forward(log_std_head, out.h);
  if (cache) {
    cache->obs = obs;
    cache->act1 = std::move(act1);
    cache->h = out.h;
    cache->mean = out.mean;
    cache->log_std = out.log_std;
  }
  return out;
}

std::vector<double> ActorNet::step_backward(const StepCache& cache,
                                            const std::vector<double>& dmean,
                                            const std::vector<double>& dlog_std,
                                            const std::vector<double>& dh_out) {
  std::vector<double> dh = dh_out;
  add_into(dh, nn::dense_backward(mean_head, cache.h, dmean));
  add_into(dh, nn::dense_backward(log_std_head, cache.h, dlog_std));
  std::vector<double> dact1(hidden, 0.0);
  std::vector<double> dh_prev = nn::gru_backward(gru, cache.gru, dh, &dact1);
  std::vector<double> dpre = nn::tanh_backward(cache.act1, dact1);
  nn::dense_backward(input, cache.obs, dpre);
  return dh_prev;
}

CriticNet CriticNet::make(std::size_t obs_dim, std::size_t n_actions,
                          std::size_t hidden, Rng& rng) {
  CriticNet net;
  net.obs_dim = obs_dim;
  net.n_actions = n_actions;
  net.hidden = hidden;
  net.input = nn::make_dense(obs_dim + n_actions, hidden);
  net.gru = nn::make_gru(hidden, hidden);
  net.value = nn::make_dense(hidden, 1);
  nn::init_dense(net.input, rng);
  nn::init_gru(net.gru, rng);
  nn::init_dense(net.value, rng);
  return net;
}

std::vector<nn::Tensor*> CriticNet::tensors() {
  std::vector<nn::Tensor*> out = input.tensors();
  for (nn::Tensor* t : gru.tensors()) out.push_back(t);
  for (nn::Tensor* t : value.tensors()) out.push_back(t);
  return out;
}

std::vector<nn::NamedTensor> CriticNet::named(const std::string& prefix) {
  return {
      {prefix + "input.w", &input.w},       {prefix + "input.b", &input.b},
      {prefix + "gru.update.w", &gru.update.w},
      {prefix + "gru.update.b", &gru.update.b},
      {prefix + "gru.reset.w", &gru.reset.w},
      {prefix + "gru.reset.b", &gru.reset.b},
      {prefix + "gru.cand.w", &gru.candidate.w},
      {prefix + "gru.cand.b", &gru.candidate.b},
      {prefix + "value.w", &value.w},       {prefix + "value.b", &value.b},
  };
}

CriticNet::StepOut CriticNet::step(const std::vector<double>& obs,
                                   const std::vector<double>& act,
                                   const std::vector<double>& h,
                                   StepCache* cache) const {
  if (obs.size() != obs_dim || act.size() != n_actions || h.size() != hidden)
    throw std::invalid_argument("critic: step shape mismatch");
  std::vector<double> in = concat(obs, act);
  std::vector<double> act1 = nn::dense_forward(input, in);
  nn::tanh_inplace(act1);
  StepOut out;
  out.h = nn::gru_forward(gru, act1, h, cache ? &cache->gru : nullptr);
  out.q = nn::dense_forward(value, out.h)[0];
  if (cache) {
    cache->in = std::move(in);
    cache->act1 = std::move(act1);
    cache->h = out.h;
  }
  return out;
}

std::vector<double> CriticNet::step_backward(const StepCache& cache, double dq,
                                             const std::vector<double>& dh_out,
                                             std::vector<double>* dact) {
  std::vector<double> dh = dh_out;
  add_into(dh, nn::dense_backward(value, cache.h, {dq}));
  std::vector<double> dact1(hidden, 0.0);
  std::vector<double> dh_prev = nn::gru_backward(gru, cache.gru, dh, &dact1);
  std::vector<double> dpre = nn::tanh_backward(cache.act1, dact1);
  std::vector<double> din = nn::dense_backward(input, cache.in, dpre);
  if (dact)
    dact->assign(din.begin() + static_cast<std::ptrdiff_t>(obs_dim), din.end());
  return dh_prev;
}

AgentLearner::AgentLearner(LearnerConfig cfg, std::uint64_t run_seed,
                           std::size_t agent_index)
    : cfg_(resolved(std::move(cfg))),
      agent_(agent_index),
      actor_(init_actor(cfg_, run_seed, agent_index)),
      critic1_(init_critic(cfg_, run_seed, agent_index, "init-critic1")),
      critic2_(init_critic(cfg_, run_seed, agent_index, "init-critic2")),
      target1_(critic1_),
      target2_(critic2_),
      log_alpha_(init_log_alpha(cfg_.alpha_init)),
      actor_opt_(actor_.tensors(), adam_with_lr(cfg_.lr)),
      critic_opt_(joined_tensors(critic1_, critic2_), adam_with_lr(cfg_.lr)),
      alpha_opt_({&log_alpha_}, adam_with_lr(cfg_.lr)),
      buffer_(cfg_.replay_capacity),
      policy_rng_(run_seed, "learner", agent_index),
      train_rng_(run_seed, "learner-train", agent_index),
      rollout_hidden_(cfg_.hidden, 0.0) {}

void AgentLearner::begin_rollout() {
  std::fill(rollout_hidden_.begin(), rollout_hidden_.end(), 0.0);
  ++episode_;
}

std::vector<double> AgentLearner::act(const std::vector<double>& obs,
                                      bool deterministic) {
  ActorNet::StepOut out = actor_.step(obs, rollout_hidden_);
  std::vector<double> raw(cfg_.n_actions, 0.0);
  if (deterministic) {
    for (std::size_t c = 0; c < cfg_.n_actions; ++c)
      raw[c] = nn::squash_deterministic(out.mean[c]);
  } else {
    for (std::size_t c = 0; c < cfg_.n_actions; ++c) {
      const double xi = policy_rng_.normal01();
      raw[c] = nn::squash_eval(out.mean[c], out.log_std[c], xi).action;
    }
  }
  if (!all_finite(out.h) || !all_finite(raw)) {
    // A poisoned hidden state would corrupt every later step of the episode,
    // so reset it along with the fallback action.
    std::fill(rollout_hidden_.begin(), rollout_hidden_.end(), 0.0);
    std::fill(raw.begin(), raw.end(), 0.0);
    ++act_incidents_;
    return raw;
  }
  rollout_hidden_ = std::move(out.h);
  return raw;
}

std::vector<double> AgentLearner::weights_from_raw(
    const std::vector<double>& raw, double floor) {
  const std::size_t n = raw.size();
  if (n == 0) throw std::invalid_argument("weights_from_raw: empty action");
  std::vector<double> w(n, 0.0);
  double sum = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    w[c] = (raw[c] + 1.0) / 2.0;
    sum += w[c];
  }
  const double uniform = 1.0 / static_cast<double>(n);
  for (std::size_t c = 0; c < n; ++c) {
    const double p = sum > 0.0 ? w[c] / sum : uniform;
    w[c] = floor + (1.0 - floor * static_cast<double>(n)) * p;
  }
  return w;
}

bool AgentLearner::can_update() const {
  return buffer_.can_sample(cfg_.seq_len());
}

AgentLearner::SeqBatch AgentLearner::draw_batch() {
  SeqBatch batch;
  batch.seqs.resize(cfg_.batch_size);
  batch.next_noise.resize(cfg_.batch_size);
  batch.cur_noise.resize(cfg_.batch_size);
  for (std::size_t s = 0; s < cfg_.batch_size; ++s) {
    batch.seqs[s] = buffer_.sample_sequence(cfg_.seq_len(), train_rng_);
    batch.next_noise[s].resize(cfg_.train_len);
    batch.cur_noise[s].resize(cfg_.train_len);
    for (std::size_t k = 0; k < cfg_.train_len; ++k) {
      batch.next_noise[s][k].resize(cfg_.n_actions);
      batch.cur_noise[s][k].resize(cfg_.n_actions);
      for (std::size_t c = 0; c < cfg_.n_actions; ++c)
        batch.next_noise[s][k][c] = train_rng_.normal01();
      for (std::size_t c = 0; c < cfg_.n_actions; ++c)
        batch.cur_noise[s][k][c] = train_rng_.normal01();
    }
  }
  return batch;
}

// Regression targets never see the online critics: the actor proposes the
// next action at each train step and the target critics, run along the stored
// prefix for hidden-state context, score it.
double AgentLearner::critic_pass(const SeqBatch& batch, bool grad,
                                 std::vector<std::vector<double>>* targets_out) {
  const std::size_t L = cfg_.seq_len();
  const std::size_t B = cfg_.burn_in;
  const std::size_t T = cfg_.train_len;
  const std::size_t S = batch.seqs.size();
  const double alpha_now = alpha();
  const std::size_t n_critics = cfg_.single_critic ? 1 : 2;
  const double denom =
      static_cast<double>(S) * static_cast<double>(T) * static_cast<double>(n_critics);

  std::vector<std::vector<double>> targets(S, std::vector<double>(T, 0.0));
  for (std::size_t s = 0; s < S; ++s) {
    const auto& seq = batch.seqs[s];

    // Actor pass over the window's L+1 observations; position j holds the
    // policy at seq[j]'s obs, position L at the last transition's next obs.
    std::vector<ActorNet::StepOut> pi(L + 1);
    std::vector<double> ha(cfg_.hidden, 0.0);
    for (std::size_t j = 0; j < L; ++j) {
      pi[j] = actor_.step(seq[j]->obs, ha);
      ha = pi[j].h;
    }
    pi[L] = actor_.step(seq[L - 1]->next_obs, ha);

    // Target critic pass along the stored actions, branching at each train
    // step into the sampled next action.
    for (std::size_t t = 0; t < n_critics; ++t) {
      CriticNet& target = t == 0 ? target1_ : target2_;
      std::vector<std::vector<double>> h_after(L + 1,
                                               std::vector<double>(cfg_.hidden, 0.0));
      for (std::size_t j = 0; j < L; ++j)
        h_after[j + 1] = target.step(seq[j]->obs, seq[j]->action, h_after[j]).h;
      for (std::size_t k = B; k < L; ++k) {
        const std::size_t ti = k - B;
        std::vector<double> next_act(cfg_.n_actions, 0.0);
        double logp = 0.0;
        for (std::size_t c = 0; c < cfg_.n_actions; ++c) {
          const nn::SquashEval ev =
              nn::squash_eval(pi[k + 1].mean[c], pi[k + 1].log_std[c],
                              batch.next_noise[s][ti][c]);
          next_act[c] = ev.action;
          logp += ev.log_prob;
        }
        const double q = target.step(seq[k]->next_obs, next_act, h_after[k + 1]).q;
        const double candidate = q - alpha_now * logp;
        if (t == 0)
          targets[s][ti] = seq[k]->reward + cfg_.gamma * candidate;
        else
          targets[s][ti] =
              std::min(targets[s][ti], seq[k]->reward + cfg_.gamma * candidate);
      }
    }
  }

  double loss = 0.0;
  for (std::size_t t = 0; t < n_critics; ++t) {
    CriticNet& critic = t == 0 ? critic1_ : critic2_;
    for (std::size_t s = 0; s < S; ++s) {
      const auto& seq = batch.seqs[s];
      std::vector<double> h(cfg_.hidden, 0.0);
      std::vector<CriticNet::StepCache> caches(T);
      std::vector<double> qs(T, 0.0);
      for (std::size_t j = 0; j < L; ++j) {
        CriticNet::StepCache* cache = grad && j >= B ? &caches[j - B] : nullptr;
        CriticNet::StepOut out = critic.step(seq[j]->obs, seq[j]->action, h, cache);
        h = std::move(out.h);
        if (j >= B) qs[j - B] = out.q;
      }
      for (std::size_t ti = 0; ti < T; ++ti) {
        const double err = qs[ti] - targets[s][ti];
        loss += err * err / denom;
      }
      if (grad) {
        // Backpropagate through the train window only; the hidden state at
        // the burn-in boundary is treated as a constant.
        std::vector<double> dh(cfg_.hidden, 0.0);
        for (std::size_t ti = T; ti-- > 0;) {
          const double dq = 2.0 * (qs[ti] - targets[s][ti]) / denom;
          dh = critic.step_backward(caches[ti], dq, dh);
        }
      }
    }
  }
  if (targets_out) *targets_out = std::move(targets);
  return loss;
}

double AgentLearner::actor_pass(const SeqBatch& batch, bool grad) {
  const std::size_t L = cfg_.seq_len();
  const std::size_t B = cfg_.burn_in;
  const std::size_t T = cfg_.train_len;
  const std::size_t S = batch.seqs.size();
  const double alpha_now = alpha();
  const double denom = static_cast<double>(S) * static_cast<double>(T);
  const std::vector<double> no_dh(cfg_.hidden, 0.0);

  double loss = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    const auto& seq = batch.seqs[s];

    std::vector<ActorNet::StepCache> acaches(T);
    std::vector<ActorNet::StepOut> pi(L);
    std::vector<double> ha(cfg_.hidden, 0.0);
    for (std::size_t j = 0; j < L; ++j) {
      ActorNet::StepCache* cache = grad && j >= B ? &acaches[j - B] : nullptr;
      pi[j] = actor_.step(seq[j]->obs, ha, cache);
      ha = pi[j].h;
    }

    // Online critics along the stored actions; h_before[j] is the hidden
    // entering step j, the context for a branch that swaps in a fresh action.
    const std::size_t n_critics = cfg_.single_critic ? 1 : 2;
    std::vector<std::vector<std::vector<double>>> h_before(
        n_critics,
        std::vector<std::vector<double>>(L, std::vector<double>(cfg_.hidden, 0.0)));
    for (std::size_t t = 0; t < n_critics; ++t) {
      CriticNet& critic = t == 0 ? critic1_ : critic2_;
      std::vector<double> h(cfg_.hidden, 0.0);
      for (std::size_t j = 0; j < L; ++j) {
        h_before[t][j] = h;
        if (j + 1 < L) h = critic.step(seq[j]->obs, seq[j]->action, h).h;
      }
    }

    std::vector<std::vector<double>> dmean(T), dlogstd(T);
    for (std::size_t k = B; k < L; ++k) {
      const std::size_t ti = k - B;
      std::vector<nn::SquashEval> evs(cfg_.n_actions);
      std::vector<double> act(cfg_.n_actions, 0.0);
      double logp = 0.0;
      for (std::size_t c = 0; c < cfg_.n_actions; ++c) {
        evs[c] = nn::squash_eval(pi[k].mean[c], pi[k].log_std[c],
                                 batch.cur_noise[s][ti][c]);
        act[c] = evs[c].action;
        logp += evs[c].log_prob;
      }

      CriticNet::StepCache c1cache, c2cache;
      const double q1 =
          critic1_.step(seq[k]->obs, act, h_before[0][k], grad ? &c1cache : nullptr).q;
      double qmin = q1;
      bool use_second = false;
      if (n_critics == 2) {
        const double q2 = critic2_
                              .step(seq[k]->obs, act, h_before[1][k],
                                    grad ? &c2cache : nullptr)
                              .q;
        if (q2 < q1) {
          qmin = q2;
          use_second = true;
        }
      }
      loss += (alpha_now * logp - qmin) / denom;

      if (grad) {
        dmean[ti].assign(cfg_.n_actions, 0.0);
        dlogstd[ti].assign(cfg_.n_actions, 0.0);
        std::vector<double> dact;
        CriticNet& chosen = use_second ? critic2_ : critic1_;
        chosen.step_backward(use_second ? c2cache : c1cache, -1.0 / denom, no_dh,
                             &dact);
        for (std::size_t c = 0; c < cfg_.n_actions; ++c) {
          dmean[ti][c] = alpha_now * evs[c].dlogp_dmean / denom +
                         dact[c] * evs[c].daction_dmean;
          dlogstd[ti][c] = alpha_now * evs[c].dlogp_dlogstd / denom +
                           dact[c] * evs[c].daction_dlogstd;
        }
      }
    }

    if (grad) {
      std::vector<double> dh(cfg_.hidden, 0.0);
      for (std::size_t ti = T; ti-- > 0;)
        dh = actor_.step_backward(acaches[ti], dmean[ti], dlogstd[ti], dh);
    }
  }
  return loss;
}

double AgentLearner::mean_train_log_prob(const SeqBatch& batch) {
  const std::size_t L = cfg_.seq_len();
  const std::size_t B = cfg_.burn_in;
  const std::size_t T = cfg_.train_len;
  const std::size_t S = batch.seqs.size();
  double total = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    const auto& seq = batch.seqs[s];
    std::vector<double> ha(cfg_.hidden, 0.0);
    for (std::size_t j = 0; j < L; ++j) {
      ActorNet::StepOut out = actor_.step(seq[j]->obs, ha);
      ha = out.h;
      if (j < B) continue;
      const std::size_t ti = j - B;
      for (std::size_t c = 0; c < cfg_.n_actions; ++c)
        total += nn::squash_eval(out.mean[c], out.log_std[c],
                                 batch.cur_noise[s][ti][c])
                     .log_prob;
    }
  }
  return total / (static_cast<double>(S) * static_cast<double>(T));
}

double AgentLearner::critic_loss(const SeqBatch& batch) {
  return critic_pass(batch, false, nullptr);
}

double AgentLearner::actor_loss(const SeqBatch& batch) {
  return actor_pass(batch, false);
}

std::vector<std::vector<double>> AgentLearner::td_targets(const SeqBatch& batch) {
  std::vector<std::vector<double>> targets;
  critic_pass(batch, false, &targets);
  return targets;
}

double AgentLearner::critic_backward(const SeqBatch& batch) {
  for (nn::Tensor* t : critic1_.tensors()) t->zero_grad();
  for (nn::Tensor* t : critic2_.tensors()) t->zero_grad();
  return critic_pass(batch, true, nullptr);
}

double AgentLearner::actor_backward(const SeqBatch& batch) {
  for (nn::Tensor* t : actor_.tensors()) t->zero_grad();
  return actor_pass(batch, true);
}

double AgentLearner::critic_update(const SeqBatch& batch) {
  const double loss = critic_backward(batch);
  critic_opt_.step();
  return loss;
}

double AgentLearner::actor_update(const SeqBatch& batch) {
  const double loss = actor_backward(batch);
  actor_opt_.step();
  return loss;
}

double AgentLearner::temperature_update(const SeqBatch& batch) {
  const double mean_logp = mean_train_log_prob(batch);
  log_alpha_.zero_grad();
  log_alpha_.g[0] = -(mean_logp + cfg_.target_entropy);
  alpha_opt_.step();
  return alpha();
}

void AgentLearner::update_targets() {
  nn::soft_update(target1_.tensors(), critic1_.tensors(), cfg_.tau);
  nn::soft_update(target2_.tensors(), critic2_.tensors(), cfg_.tau);
}

AgentLearner::UpdateStats AgentLearner::update_once() {
  UpdateStats stats;
  if (!can_update()) return stats;
  const SeqBatch batch = draw_batch();
  stats.critic_loss = critic_update(batch);
  stats.actor_loss = actor_update(batch);
  stats.alpha = temperature_update(batch);
  update_targets();
  stats.ran = true;
  return stats;
}

double AgentLearner::alpha() const { return std::exp(log_alpha_.v[0]); }

std::vector<nn::NamedTensor> AgentLearner::named_tensors() {
  std::vector<nn::NamedTensor> out;
  append_named(out, actor_.named("actor."));
  append_named(out, critic1_.named("critic1."));
  append_named(out, critic2_.named("critic2."));
  append_named(out, target1_.named("target1."));
  append_named(out, target2_.named("target2."));
  out.push_back({"alpha.log", &log_alpha_});
  return out;
}

}  // namespace marllb::rl
