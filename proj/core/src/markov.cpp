#include "marllb/markov/chain.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace marllb::markov {

const char* to_string(ChainPolicy p) {
  switch (p) {
    case ChainPolicy::ecmp: return "ecmp";
    case ChainPolicy::wcmp: return "wcmp";
    case ChainPolicy::lsq: return "lsq";
    case ChainPolicy::sed: return "sed";
  }
  return "?";
}

ChainPolicy chain_policy_from_string(std::string_view name) {
  if (name == "ecmp") return ChainPolicy::ecmp;
  if (name == "wcmp") return ChainPolicy::wcmp;
  if (name == "lsq") return ChainPolicy::lsq;
  if (name == "sed") return ChainPolicy::sed;
  throw std::invalid_argument("unknown chain policy: " + std::string(name));
}

void ChainConfig::validate() const {
  if (q_cap < 1) throw std::domain_error("q_cap must be >= 1");
  const double rates[] = {lambda_observed, gamma_unobserved, v1, v2};
  for (double r : rates) {
    if (!(r >= 0.0) || !std::isfinite(r))
      throw std::domain_error("rates must be finite and nonnegative");
  }
  if (lambda_observed + gamma_unobserved + v1 + v2 > 1.0 + 1e-12)
    throw std::domain_error("rate budget exceeded: one event per slot");
  if (!(w1 >= 0.0) || !(w2 >= 0.0) || !(w1 + w2 > 0.0))
    throw std::domain_error("weights must be nonnegative with positive sum");
}

double& ChainDistribution::at(int l1, int l2) {
  return p[static_cast<std::size_t>(l1) * (q_cap + 1) + l2];
}

double ChainDistribution::at(int l1, int l2) const {
  return p[static_cast<std::size_t>(l1) * (q_cap + 1) + l2];
}

double ChainDistribution::sum() const {
  double s = 0.0;
  for (double x : p) s += x;
  return s;
}

std::vector<double> ChainDistribution::marginal1() const {
  std::vector<double> m(q_cap + 1, 0.0);
  for (int l1 = 0; l1 <= q_cap; ++l1)
    for (int l2 = 0; l2 <= q_cap; ++l2) m[l1] += at(l1, l2);
  return m;
}

std::vector<double> ChainDistribution::marginal2() const {
  std::vector<double> m(q_cap + 1, 0.0);
  for (int l1 = 0; l1 <= q_cap; ++l1)
    for (int l2 = 0; l2 <= q_cap; ++l2) m[l2] += at(l1, l2);
  return m;
}

ChainDistribution point_mass(int q_cap, int l1, int l2) {
  if (l1 < 0 || l2 < 0 || l1 > q_cap || l2 > q_cap)
    throw std::out_of_range("point mass outside the state box");
  ChainDistribution d;
  d.q_cap = q_cap;
  d.p.assign(static_cast<std::size_t>(q_cap + 1) * (q_cap + 1), 0.0);
  d.at(l1, l2) = 1.0;
  return d;
}

ChainDistribution uniform_distribution(int q_cap) {
  ChainDistribution d;
  d.q_cap = q_cap;
  const std::size_t n = static_cast<std::size_t>(q_cap + 1) * (q_cap + 1);
  d.p.assign(n, 1.0 / static_cast<double>(n));
  return d;
}

void TransitionOperator::apply(const std::vector<double>& in,
                               std::vector<double>& out) const {
  const std::size_t n = static_cast<std::size_t>(n_states());
  out.assign(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    const double mass = in[s];
    if (mass == 0.0) continue;
    for (std::size_t k = row_offset[s]; k < row_offset[s + 1]; ++k)
      out[target[k]] += mass * prob[k];
  }
}

std::vector<double> TransitionOperator::row_sums() const {
  const std::size_t n = static_cast<std::size_t>(n_states());
  std::vector<double> sums(n, 0.0);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t k = row_offset[s]; k < row_offset[s + 1]; ++k)
      sums[s] += prob[k];
  return sums;
}

namespace {

// Observed-arrival split per policy; LSQ/SED commit the whole rate to the
// argmin server for the current state, ties split evenly.
void observed_split(const ChainConfig& cfg, int l1, int l2, double* a1,
                    double* a2) {
  const double lam = cfg.lambda_observed;
  switch (cfg.policy) {
    case ChainPolicy::ecmp:
      *a1 = 0.5 * lam;
      *a2 = 0.5 * lam;
      return;
    case ChainPolicy::wcmp: {
      const double total = cfg.w1 + cfg.w2;
      *a1 = lam * cfg.w1 / total;
      *a2 = lam * cfg.w2 / total;
      return;
    }
    case ChainPolicy::lsq:
      if (l1 < l2) {
        *a1 = lam;
        *a2 = 0.0;
      } else if (l2 < l1) {
        *a1 = 0.0;
        *a2 = lam;
      } else {
        *a1 = 0.5 * lam;
        *a2 = 0.5 * lam;
      }
      return;
    case ChainPolicy::sed: {
      const double inf = std::numeric_limits<double>::infinity();
      const double k1 = cfg.w1 > 0.0 ? (l1 + 1) / cfg.w1 : inf;
      const double k2 = cfg.w2 > 0.0 ? (l2 + 1) / cfg.w2 : inf;
      if (k1 < k2) {
        *a1 = lam;
        *a2 = 0.0;
      } else if (k2 < k1) {
        *a1 = 0.0;
        *a2 = lam;
      } else {
        *a1 = 0.5 * lam;
        *a2 = 0.5 * lam;
      }
      return;
    }
  }
  std::abort();
}

}  // namespace

TransitionOperator build_transition(const ChainConfig& cfg) {
  cfg.validate();
  TransitionOperator op;
  op.q_cap = cfg.q_cap;
  const int side = cfg.q_cap + 1;
  const int n = side * side;
  op.row_offset.reserve(n + 1);
  op.row_offset.push_back(0);
  op.target.reserve(static_cast<std::size_t>(n) * 5);
  op.prob.reserve(static_cast<std::size_t>(n) * 5);

  for (int l1 = 0; l1 < side; ++l1) {
    for (int l2 = 0; l2 < side; ++l2) {
      const int s = l1 * side + l2;
      double a1 = 0.0;
      double a2 = 0.0;
      observed_split(cfg, l1, l2, &a1, &a2);
      a1 += 0.5 * cfg.gamma_unobserved;
      a2 += 0.5 * cfg.gamma_unobserved;

      double moved = 0.0;
      auto add = [&](int to, double p) {
        if (p <= 0.0) return;
        op.target.push_back(to);
        op.prob.push_back(p);
        moved += p;
      };
      if (l1 < cfg.q_cap) add(s + side, a1);
      if (l2 < cfg.q_cap) add(s + 1, a2);
      if (l1 > 0) add(s - side, cfg.v1);
      if (l2 > 0) add(s - 1, cfg.v2);
      add(s, 1.0 - moved);
      op.row_offset.push_back(op.target.size());
    }
  }
  return op;
}

ChainDistribution stationary(const TransitionOperator& op, double tolerance,
                             std::size_t max_iterations,
                             const ChainDistribution* initial) {
  const std::size_t n = static_cast<std::size_t>(op.n_states());
  ChainDistribution dist;
  if (initial != nullptr) {
    if (initial->q_cap != op.q_cap)
      throw std::invalid_argument("initial distribution has the wrong shape");
    dist = *initial;
  } else {
    dist = uniform_distribution(op.q_cap);
  }

  std::vector<double> next(n, 0.0);
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < max_iterations; ++it) {
    op.apply(dist.p, next);
    double change = 0.0;
    double total = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      const double damped = 0.5 * (next[s] + dist.p[s]);
      change += std::abs(damped - dist.p[s]);
      next[s] = damped;
      total += damped;
    }
    for (std::size_t s = 0; s < n; ++s) dist.p[s] = next[s] / total;
    residual = change;
    if (change < tolerance) return dist;
  }
  throw std::runtime_error("stationary iteration did not converge, residual " +
                           std::to_string(residual));
}

double weighted_service_duration(const ChainDistribution& dist, double v1,
                                 double v2) {
  if (!(v1 > 0.0) || !(v2 > 0.0))
    throw std::domain_error("service rates must be positive");
  double acc = 0.0;
  for (int l1 = 0; l1 <= dist.q_cap; ++l1) {
    for (int l2 = 0; l2 <= dist.q_cap; ++l2) {
      const int total = l1 + l2;
      if (total == 0) continue;
      const double share1 = static_cast<double>(l1) / total;
      const double share2 = static_cast<double>(l2) / total;
      acc += dist.at(l1, l2) * (share1 * (l1 / v1) + share2 * (l2 / v2));
    }
  }
  return acc;
}

const char* to_string(ScenarioPreset s) {
  switch (s) {
    case ScenarioPreset::ideal: return "ideal";
    case ScenarioPreset::obs50: return "obs50";
    case ScenarioPreset::obs33: return "obs33";
    case ScenarioPreset::misweighted: return "misweighted";
  }
  return "?";
}

ScenarioPreset scenario_preset_from_string(std::string_view name) {
  if (name == "ideal") return ScenarioPreset::ideal;
  if (name == "obs50") return ScenarioPreset::obs50;
  if (name == "obs33") return ScenarioPreset::obs33;
  if (name == "misweighted") return ScenarioPreset::misweighted;
  throw std::invalid_argument("unknown scenario preset: " + std::string(name));
}

ChainConfig make_scenario(ChainPolicy policy, ScenarioPreset preset,
                          int q_cap) {
  ChainConfig cfg;
  cfg.q_cap = q_cap;
  cfg.policy = policy;
  cfg.v1 = 1.0 / 3.0;
  cfg.v2 = 1.0 / 6.0;
  cfg.w1 = 2.0;
  cfg.w2 = 1.0;
  switch (preset) {
    case ScenarioPreset::ideal:
      cfg.lambda_observed = 0.5;
      cfg.gamma_unobserved = 0.0;
      break;
    case ScenarioPreset::obs50:
      cfg.lambda_observed = 0.25;
      cfg.gamma_unobserved = 0.25;
      break;
    case ScenarioPreset::obs33:
      cfg.lambda_observed = 1.0 / 6.0;
      cfg.gamma_unobserved = 1.0 / 3.0;
      break;
    case ScenarioPreset::misweighted:
      cfg.lambda_observed = 0.5;
      cfg.gamma_unobserved = 0.0;
      cfg.w1 = 1.0;
      cfg.w2 = 2.0;
      break;
  }
  return cfg;
}

std::vector<ScenarioCell> scenario_sweep(int q_cap) {
  const ChainPolicy policies[] = {ChainPolicy::ecmp, ChainPolicy::wcmp,
                                  ChainPolicy::lsq, ChainPolicy::sed};
  const ScenarioPreset presets[] = {
      ScenarioPreset::ideal, ScenarioPreset::obs50, ScenarioPreset::obs33,
      ScenarioPreset::misweighted};
  std::vector<ScenarioCell> table;
  table.reserve(16);
  for (ChainPolicy p : policies) {
    for (ScenarioPreset s : presets) {
      const ChainConfig cfg = make_scenario(p, s, q_cap);
      const auto op = build_transition(cfg);
      const auto dist = stationary(op);
      table.push_back({p, s, weighted_service_duration(dist, cfg.v1, cfg.v2)});
    }
  }
  return table;
}

}  // namespace marllb::markov
