#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace marllb::lb {

// Per-server remaining processing time, seconds. Index = server id.
using LoadVector = std::vector<double>;

// Row-major [agent][server] split of the load vector by owning agent.
// Column sums reproduce the global LoadVector.
struct PerAgentLoad {
  std::size_t agents = 0;
  std::size_t servers = 0;
  std::vector<double> cells;

  PerAgentLoad() = default;
  PerAgentLoad(std::size_t m, std::size_t n)
      : agents(m), servers(n), cells(m * n, 0.0) {}

  double& at(std::size_t agent, std::size_t server) {
    return cells[agent * servers + server];
  }
  double at(std::size_t agent, std::size_t server) const {
    return cells[agent * servers + server];
  }

  LoadVector row(std::size_t agent) const {
    if (agent >= agents) throw std::out_of_range("PerAgentLoad: agent index");
    return LoadVector(cells.begin() + agent * servers,
                      cells.begin() + (agent + 1) * servers);
  }

  LoadVector column_sums() const {
    LoadVector out(servers, 0.0);
    for (std::size_t i = 0; i < agents; ++i)
      for (std::size_t j = 0; j < servers; ++j) out[j] += at(i, j);
    return out;
  }
};

// Strictly positive weights over servers, summing to 1.
struct Action {
  std::vector<double> weights;
};

enum class RewardKind { vbf, pbf, neg_cv, neg_makespan };

RewardKind reward_kind_from_string(const std::string& s);
std::string to_string(RewardKind k);

struct FairnessScore {
  double makespan = 0.0;
  double vbf = 0.0;
  double pbf = 0.0;
  double cv = 0.0;
};

}  // namespace marllb::lb
