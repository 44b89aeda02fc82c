#include "marllb/policy/policies.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "marllb/lb/fairness.hpp"

namespace marllb::policy {

Kind kind_from_string(const std::string& s) {
  if (s == "ecmp") return Kind::ecmp;
  if (s == "wcmp") return Kind::wcmp;
  if (s == "lsq") return Kind::lsq;
  if (s == "sed") return Kind::sed;
  if (s == "oracle") return Kind::oracle;
  if (s == "rl") return Kind::rl;
  throw std::invalid_argument("unknown policy: " + s);
}

std::string to_string(Kind k) {
  switch (k) {
    case Kind::ecmp: return "ecmp";
    case Kind::wcmp: return "wcmp";
    case Kind::lsq: return "lsq";
    case Kind::sed: return "sed";
    case Kind::oracle: return "oracle";
    case Kind::rl: return "rl";
  }
  throw std::logic_error("unhandled policy kind");
}

std::size_t ecmp_pick(std::size_t n_servers, Rng& rng) {
  if (n_servers == 0) throw std::invalid_argument("ecmp: no servers");
  return static_cast<std::size_t>(rng.uniform_int(n_servers));
}

std::size_t wcmp_pick(const std::vector<double>& weights, Rng& rng) {
  return rng.categorical(weights);  // validates positivity
}

std::size_t lsq_pick(const std::vector<int>& ongoing) {
  if (ongoing.empty()) throw std::invalid_argument("lsq: no servers");
  std::size_t best = 0;
  for (std::size_t k = 1; k < ongoing.size(); ++k)
    if (ongoing[k] < ongoing[best]) best = k;
  return best;
}

std::size_t sed_pick(const std::vector<int>& ongoing,
                     const std::vector<double>& weights) {
  if (ongoing.empty() || ongoing.size() != weights.size())
    throw std::invalid_argument("sed: size mismatch");
  lb::Action a{weights};
  return lb::assign_server(ongoing, a);
}

std::vector<double> nominal_weights(const std::vector<sim::ServerSpec>& servers) {
  std::vector<double> w;
  w.reserve(servers.size());
  for (const auto& s : servers) w.push_back(s.rate * s.cpu_count);
  return w;
}

std::size_t EcmpPolicy::pick_server(const sim::PickView& view) {
  return ecmp_pick(view.ongoing.size(), view.rng);
}

WcmpPolicy::WcmpPolicy(std::vector<double> weights)
    : configured_(std::move(weights)) {}

void WcmpPolicy::begin_episode(std::size_t, const sim::EpisodeConfig& cfg) {
  weights_ = configured_.empty() ? nominal_weights(cfg.servers) : configured_;
  if (weights_.size() != cfg.servers.size())
    throw std::invalid_argument("wcmp: weight count does not match servers");
}

std::size_t WcmpPolicy::pick_server(const sim::PickView& view) {
  return wcmp_pick(weights_, view.rng);
}

std::size_t LsqPolicy::pick_server(const sim::PickView& view) {
  return lsq_pick(view.ongoing);
}

SedPolicy::SedPolicy(std::vector<double> weights)
    : configured_(std::move(weights)) {}

void SedPolicy::begin_episode(std::size_t, const sim::EpisodeConfig& cfg) {
  weights_ = configured_.empty() ? nominal_weights(cfg.servers) : configured_;
  if (weights_.size() != cfg.servers.size())
    throw std::invalid_argument("sed: weight count does not match servers");
}

std::size_t SedPolicy::pick_server(const sim::PickView& view) {
  return sed_pick(view.ongoing, weights_);
}

std::size_t OraclePolicy::pick_server(const sim::PickView& view) {
  const std::size_t n = view.ongoing.size();
  std::size_t best = 0;
  double best_time = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    const double t = view.engine.completion_time_estimate(j, view.task, view.now);
    if (t < best_time) {
      best_time = t;
      best = j;
    }
  }
  return best;
}

void WeightedDispatchPolicy::begin_episode(std::size_t,
                                           const sim::EpisodeConfig& cfg) {
  if (weights_.size() != cfg.servers.size())
    weights_.assign(cfg.servers.size(),
                    1.0 / static_cast<double>(cfg.servers.size()));
}

std::size_t WeightedDispatchPolicy::pick_server(const sim::PickView& view) {
  return lb::assign_server(view.ongoing, lb::Action{weights_});
}

const std::vector<double>* WeightedDispatchPolicy::current_action() const {
  return weights_.empty() ? nullptr : &weights_;
}

void WeightedDispatchPolicy::set_action(std::vector<double> weights) {
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("dispatch action must be strictly positive");
  weights_ = std::move(weights);
}

std::shared_ptr<sim::AgentPolicy> make_baseline(Kind kind,
                                                std::vector<double> weights) {
  switch (kind) {
    case Kind::ecmp: return std::make_shared<EcmpPolicy>();
    case Kind::wcmp: return std::make_shared<WcmpPolicy>(std::move(weights));
    case Kind::lsq: return std::make_shared<LsqPolicy>();
    case Kind::sed: return std::make_shared<SedPolicy>(std::move(weights));
    case Kind::oracle: return std::make_shared<OraclePolicy>();
    case Kind::rl:
      throw std::invalid_argument("rl policy is built by the trainer, not here");
  }
  throw std::logic_error("unhandled policy kind");
}

}  // namespace marllb::policy
