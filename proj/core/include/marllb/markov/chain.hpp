#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace marllb::markov {

// Two-server slotted chain: state (l1, l2) in [0, q_cap]^2, at most one
// arrival or departure per slot, so all rates must fit in a unit budget.
enum class ChainPolicy { ecmp, wcmp, lsq, sed };

const char* to_string(ChainPolicy p);
ChainPolicy chain_policy_from_string(std::string_view name);

struct ChainConfig {
  int q_cap = 30;
  double lambda_observed = 0.0;   // dispatched by the policy
  double gamma_unobserved = 0.0;  // split half/half regardless of policy
  double v1 = 0.0;
  double v2 = 0.0;
  ChainPolicy policy = ChainPolicy::ecmp;
  double w1 = 1.0;  // configured weights, not necessarily the true speeds
  double w2 = 1.0;

  void validate() const;
};

struct ChainDistribution {
  int q_cap = 0;
  std::vector<double> p;  // index l1 * (q_cap + 1) + l2

  double& at(int l1, int l2);
  double at(int l1, int l2) const;
  double sum() const;
  std::vector<double> marginal1() const;
  std::vector<double> marginal2() const;
};

ChainDistribution point_mass(int q_cap, int l1, int l2);
ChainDistribution uniform_distribution(int q_cap);

// Sparse row-stochastic operator; row = source state, entries = (target, prob).
// Arrivals into a full queue and departures from an empty one fold into the
// self-loop.
struct TransitionOperator {
  int q_cap = 0;
  std::vector<std::size_t> row_offset;
  std::vector<int> target;
  std::vector<double> prob;

  int n_states() const { return (q_cap + 1) * (q_cap + 1); }
  void apply(const std::vector<double>& in, std::vector<double>& out) const;
  std::vector<double> row_sums() const;
};

TransitionOperator build_transition(const ChainConfig& cfg);

// Damped power iteration ((P + I) / 2) until the L1 step change drops below
// tolerance; throws with the residual if max_iterations is exhausted.
ChainDistribution stationary(const TransitionOperator& op,
                             double tolerance = 1e-10,
                             std::size_t max_iterations = 1000000,
                             const ChainDistribution* initial = nullptr);

// E[ sum_i (l_i / (l1 + l2)) * (l_i / v_i) ]; empty states contribute 0.
double weighted_service_duration(const ChainDistribution& dist, double v1,
                                 double v2);

// Presets at nominal capacity: v1 = 1/3, v2 = 1/6 (2x speed ratio) and
// lambda + gamma = 1/2. obs50/obs33 shift observed traffic into the blind
// uniform split; misweighted swaps the configured weight ratio.
enum class ScenarioPreset { ideal, obs50, obs33, misweighted };

const char* to_string(ScenarioPreset s);
ScenarioPreset scenario_preset_from_string(std::string_view name);

ChainConfig make_scenario(ChainPolicy policy, ScenarioPreset preset,
                          int q_cap = 30);

struct ScenarioCell {
  ChainPolicy policy;
  ScenarioPreset preset;
  double metric;
};

std::vector<ScenarioCell> scenario_sweep(int q_cap = 30);

}  // namespace marllb::markov
