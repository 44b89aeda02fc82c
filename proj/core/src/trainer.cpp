#include "marllb/rl/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <utility>

#include "marllb/common.hpp"
#include "marllb/lb/fairness.hpp"
#include "marllb/nn/checkpoint.hpp"
#include "marllb/policy/policies.hpp"

namespace marllb::rl {
namespace {

// Sum of per-tick rewards for one agent; tick 0 carries no finished interval.
double episodic_return(const sim::SimTrace& trace, std::size_t agent) {
  double total = 0.0;
  for (std::size_t t = 1; t < trace.ticks.size(); ++t)
    total += trace.ticks[t].reward[agent];
  return total;
}

double mean_tick_reward(const sim::SimTrace& trace, std::size_t agent) {
  if (trace.ticks.size() < 2) return 0.0;
  return episodic_return(trace, agent) /
         static_cast<double>(trace.ticks.size() - 1);
}

struct PairedStats {
  double mean = 0.0;
  double ci_half = 0.0;
};

PairedStats paired_stats(const std::vector<double>& xs) {
  PairedStats out;
  const std::size_t n = xs.size();
  if (n == 0) return out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(n);
  if (n < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  out.ci_half = 1.96 * sd / std::sqrt(static_cast<double>(n));
  return out;
}

}  // namespace

RlDispatchPolicy::RlDispatchPolicy(std::shared_ptr<AgentLearner> learner,
                                   bool deterministic, bool record)
    : learner_(std::move(learner)),
      deterministic_(deterministic),
      record_(record) {
  if (!learner_) throw std::invalid_argument("rl policy: missing learner");
}

void RlDispatchPolicy::begin_episode(std::size_t, const sim::EpisodeConfig& cfg) {
  const std::size_t n = cfg.servers.size();
  if (n != learner_->config().n_actions)
    throw std::invalid_argument("rl policy: server count does not match learner");
  learner_->begin_rollout();
  weights_.assign(n, 1.0 / static_cast<double>(n));
  held_prev_raw_.assign(n, 0.0);
  held_raw_.clear();
  held_obs_.clear();
  has_held_ = false;
  step_ = 0;
}

void RlDispatchPolicy::push_transition(double reward,
                                       const std::vector<double>& next_obs) {
  TransitionRecord rec;
  rec.prev_action = held_prev_raw_;
  rec.obs = held_obs_;
  rec.action = held_raw_;
  rec.reward = reward;
  rec.next_obs = next_obs;
  rec.episode = learner_->episode_index();
  rec.step = step_++;
  learner_->buffer().push(std::move(rec));
}

void RlDispatchPolicy::take_action(const std::vector<double>& obs) {
  std::vector<double> raw = learner_->act(obs, deterministic_);
  weights_ = AgentLearner::weights_from_raw(raw, learner_->config().action_floor);
  if (has_held_) held_prev_raw_ = held_raw_;
  held_raw_ = std::move(raw);
  held_obs_ = obs;
  has_held_ = true;
}

void RlDispatchPolicy::on_tick(const sim::TickView& view) {
  if (record_ && has_held_ && !view.first) push_transition(view.reward, view.obs);
  take_action(view.obs);
}

std::size_t RlDispatchPolicy::pick_server(const sim::PickView& view) {
  return lb::assign_server(view.ongoing, lb::Action{weights_});
}

void RlDispatchPolicy::end_episode(const sim::EndView& view) {
  if (record_ && has_held_) push_transition(view.reward, view.obs);
}

const std::vector<double>* RlDispatchPolicy::current_action() const {
  return weights_.empty() ? nullptr : &weights_;
}

LearnerConfig resolve_learner_config(LearnerConfig base,
                                     const sim::EpisodeConfig& episode) {
  obs::ObservationLayout layout;
  layout.n_servers = episode.servers.size();
  base.obs_dim = layout.dim();
  base.n_actions = episode.servers.size();
  return base;
}

Trainer::Trainer(TrainerConfig cfg) : cfg_(std::move(cfg)) {
  sim::validate(cfg_.episode);
  cfg_.learner = resolve_learner_config(cfg_.learner, cfg_.episode);
  for (std::size_t i = 0; i < cfg_.episode.n_agents; ++i)
    learners_.push_back(
        std::make_shared<AgentLearner>(cfg_.learner, cfg_.seed, i));
}

sim::SimTrace Trainer::run_episode() {
  const std::uint64_t episode_seed =
      derive_stream_seed(cfg_.seed, "train-episode", episodes_done_);
  std::vector<std::shared_ptr<sim::AgentPolicy>> policies;
  policies.reserve(learners_.size());
  for (auto& learner : learners_)
    policies.push_back(std::make_shared<RlDispatchPolicy>(learner, false, true));
  sim::SimTrace trace = sim::run_episode(cfg_.episode, policies, episode_seed);

  for (std::size_t i = 0; i < learners_.size(); ++i) {
    double critic_sum = 0.0, actor_sum = 0.0;
    std::size_t ran = 0;
    double alpha_now = learners_[i]->alpha();
    for (std::size_t u = 0; u < cfg_.updates_per_episode; ++u) {
      AgentLearner::UpdateStats stats = learners_[i]->update_once();
      if (!stats.ran) break;
      critic_sum += stats.critic_loss;
      actor_sum += stats.actor_loss;
      alpha_now = stats.alpha;
      ++ran;
    }
    CurveRow row;
    row.episode = episodes_done_;
    row.agent = i;
    row.mean_reward = mean_tick_reward(trace, i);
    row.critic_loss = ran ? critic_sum / static_cast<double>(ran) : 0.0;
    row.actor_loss = ran ? actor_sum / static_cast<double>(ran) : 0.0;
    row.alpha = alpha_now;
    curve_.push_back(row);
  }
  ++episodes_done_;
  return trace;
}

void Trainer::run() {
  for (std::size_t e = 0; e < cfg_.episodes; ++e) run_episode();
}

std::string Trainer::checkpoint_path(const std::string& dir, std::size_t agent) {
  return dir + "/agent_" + std::to_string(agent) + ".ckpt";
}

void Trainer::save_checkpoints(const std::string& dir,
                               std::uint64_t config_hash) const {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < learners_.size(); ++i)
    nn::save_checkpoint(checkpoint_path(dir, i), config_hash,
                        learners_[i]->named_tensors());
}

std::uint64_t Trainer::load_checkpoints(const std::string& dir) {
  std::uint64_t hash = 0;
  for (std::size_t i = 0; i < learners_.size(); ++i) {
    const std::uint64_t h =
        nn::load_checkpoint(checkpoint_path(dir, i), learners_[i]->named_tensors());
    if (i == 0)
      hash = h;
    else if (h != hash)
      throw std::runtime_error("checkpoint set mixes config hashes");
  }
  return hash;
}

void Trainer::write_curve_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "episode,agent,mean_reward,actor_loss,critic_loss,alpha\n";
  char buf[160];
  for (const CurveRow& row : curve_) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.10g,%.10g,%.10g,%.10g\n",
                  row.episode, row.agent, row.mean_reward, row.actor_loss,
                  row.critic_loss, row.alpha);
    out << buf;
  }
}

std::vector<NeGapAgentReport> ne_gap_probe(
    const sim::EpisodeConfig& episode,
    const std::vector<std::shared_ptr<AgentLearner>>& learners,
    const std::vector<std::shared_ptr<AgentLearner>>& rivals,
    std::size_t episodes, std::uint64_t seed) {
  if (learners.size() != episode.n_agents)
    throw std::invalid_argument("ne gap: one learner per agent required");
  if (!rivals.empty() && rivals.size() != learners.size())
    throw std::invalid_argument("ne gap: rival set must cover every agent");
  if (episodes == 0) throw std::invalid_argument("ne gap: need episodes");

  const std::size_t M = learners.size();
  auto joint_policies = [&]() {
    std::vector<std::shared_ptr<sim::AgentPolicy>> ps;
    for (const auto& l : learners)
      ps.push_back(std::make_shared<RlDispatchPolicy>(l, true, false));
    return ps;
  };
  auto episode_seed = [&](std::size_t e) {
    return derive_stream_seed(seed, "ne-episode", e);
  };

  // Joint returns once; every deviation run reuses the same episode seeds so
  // differences are paired common-random-number estimates.
  std::vector<std::vector<double>> joint(M, std::vector<double>(episodes, 0.0));
  for (std::size_t e = 0; e < episodes; ++e) {
    sim::SimTrace trace =
        sim::run_episode(episode, joint_policies(), episode_seed(e));
    for (std::size_t i = 0; i < M; ++i) joint[i][e] = episodic_return(trace, i);
  }

  std::vector<std::string> names = {"lsq", "sed", "uniform"};
  if (!rivals.empty()) names.push_back("rival");

  std::vector<NeGapAgentReport> reports(M);
  for (std::size_t i = 0; i < M; ++i) {
    NeGapAgentReport& rep = reports[i];
    rep.agent = i;
    const PairedStats js = paired_stats(joint[i]);
    rep.joint_value = js.mean;
    rep.joint_ci_half = js.ci_half;

    bool first = true;
    for (const std::string& name : names) {
      std::vector<double> diffs(episodes, 0.0);
      for (std::size_t e = 0; e < episodes; ++e) {
        std::vector<std::shared_ptr<sim::AgentPolicy>> ps = joint_policies();
        if (name == "lsq") {
          ps[i] = std::make_shared<policy::LsqPolicy>();
        } else if (name == "sed") {
          ps[i] = std::make_shared<policy::SedPolicy>();
        } else if (name == "uniform") {
          auto fixed = std::make_shared<policy::WeightedDispatchPolicy>();
          fixed->set_action(std::vector<double>(
              episode.servers.size(), 1.0 / static_cast<double>(episode.servers.size())));
          ps[i] = fixed;
        } else {
          ps[i] = std::make_shared<RlDispatchPolicy>(rivals[i], true, false);
        }
        sim::SimTrace trace = sim::run_episode(episode, ps, episode_seed(e));
        diffs[e] = episodic_return(trace, i) - joint[i][e];
      }
      const PairedStats ds = paired_stats(diffs);
      rep.deviations.push_back({name, ds.mean, ds.ci_half});
      if (first || ds.mean > rep.gap) {
        rep.gap = ds.mean;
        rep.gap_ci_half = ds.ci_half;
        first = false;
      }
    }
  }
  return reports;
}

}  // namespace marllb::rl
