#pragma once

#include <cstddef>
#include <vector>

#include "marllb/lb/types.hpp"

namespace marllb::lb {

// Largest entry of the load vector. Throws on empty or non-finite input.
double makespan(const LoadVector& load);

// Variance-based fairness: negative population variance. 0 iff perfectly
// balanced, more negative the more uneven the load.
double vbf(const LoadVector& load);

// VBF of one agent's own load row.
double per_agent_vbf(const PerAgentLoad& split, std::size_t agent);

struct VbfDecomposition {
  double total;       // vbf(a + b)
  double part_a;      // vbf(a)
  double part_b;      // vbf(b)
  double covariance;  // population covariance of a and b
};

// Splits the fairness of a two-way load sum. Exact identity:
//   total == part_a + part_b - 2 * covariance
// (the cross term vanishes only when the rows are uncorrelated).
VbfDecomposition vbf_decomposition(const LoadVector& a, const LoadVector& b);

// Product-based fairness: prod(l_j) / max(l_j). Any idle server zeroes it;
// the all-zero vector maps to 0. Requires nonnegative entries.
double pbf(const LoadVector& load);

// Coefficient of variation: population stddev / mean. All-zero vector maps
// to 0. Requires nonnegative entries.
double cv(const LoadVector& load);

FairnessScore score(const LoadVector& load);

// Scalar reward for a load view under the configured fairness kind. vbf and
// pbf are higher-is-better already; cv and makespan enter negated.
double reward(RewardKind kind, const LoadVector& view);

// Time-cumulative VBF over a load trajectory. This is the quantity whose
// per-agent improvement equals each agent's own cumulative VBF improvement,
// which is what makes selfish VBF ascent a shared-objective ascent.
double potential(const std::vector<LoadVector>& trajectory);

// Deterministic greedy dispatch: pick argmin_k (q_k + 1) / a_k, lowest index
// on ties. Invariant under positive rescaling of the action.
std::size_t assign_server(const std::vector<int>& ongoing, const Action& action);

// Exhaustive argmax over all allocations of total_work into bins of size
// `step` across n_servers. Returns every allocation within `tol` of the best
// metric value. Guard-railed to small instances; used as the ground-truth
// oracle the optimisation properties are checked against.
std::vector<LoadVector> argmax_fairness_bruteforce(double total_work,
                                                   std::size_t n_servers,
                                                   double step, RewardKind metric,
                                                   double tol = 1e-9);

}  // namespace marllb::lb
