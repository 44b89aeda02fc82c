#include "marllb/lb/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace marllb::lb {

namespace {

void require_loads(const LoadVector& load, bool nonnegative) {
  if (load.empty()) throw std::invalid_argument("load vector is empty");
  for (double v : load) {
    if (!std::isfinite(v)) throw std::invalid_argument("load vector has non-finite entry");
    if (nonnegative && v < 0.0)
      throw std::invalid_argument("load vector has negative entry");
  }
}

double mean_of(const LoadVector& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double population_variance(const LoadVector& v) {
  // Exact zero on uniform input; the float mean of identical entries can
  // drift an ulp and manufacture a spurious negative fairness.
  bool uniform = true;
  for (double x : v) uniform = uniform && x == v.front();
  if (uniform) return 0.0;
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / static_cast<double>(v.size());
}

}  // namespace

RewardKind reward_kind_from_string(const std::string& s) {
  if (s == "vbf") return RewardKind::vbf;
  if (s == "pbf") return RewardKind::pbf;
  if (s == "cv" || s == "neg_cv") return RewardKind::neg_cv;
  if (s == "makespan" || s == "neg_makespan") return RewardKind::neg_makespan;
  throw std::invalid_argument("unknown reward kind: " + s);
}

std::string to_string(RewardKind k) {
  switch (k) {
    case RewardKind::vbf: return "vbf";
    case RewardKind::pbf: return "pbf";
    case RewardKind::neg_cv: return "neg_cv";
    case RewardKind::neg_makespan: return "neg_makespan";
  }
  throw std::logic_error("unhandled RewardKind");
}

double makespan(const LoadVector& load) {
  require_loads(load, false);
  return *std::max_element(load.begin(), load.end());
}

double vbf(const LoadVector& load) {
  require_loads(load, false);
  return -population_variance(load);
}

double per_agent_vbf(const PerAgentLoad& split, std::size_t agent) {
  return vbf(split.row(agent));
}

VbfDecomposition vbf_decomposition(const LoadVector& a, const LoadVector& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("vbf_decomposition: size mismatch");
  require_loads(a, false);
  require_loads(b, false);
  LoadVector sum(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) sum[j] = a[j] + b[j];

  const double ma = mean_of(a);
  const double mb = mean_of(b);
  double cov = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) cov += (a[j] - ma) * (b[j] - mb);
  cov /= static_cast<double>(a.size());

  return VbfDecomposition{vbf(sum), vbf(a), vbf(b), cov};
}

double pbf(const LoadVector& load) {
  require_loads(load, true);
  const double mx = *std::max_element(load.begin(), load.end());
  if (mx == 0.0) return 0.0;
  double prod = 1.0;
  for (double v : load) prod *= v;
  return prod / mx;
}

double cv(const LoadVector& load) {
  require_loads(load, true);
  const double m = mean_of(load);
  if (m == 0.0) return 0.0;
  return std::sqrt(population_variance(load)) / m;
}

FairnessScore score(const LoadVector& load) {
  return FairnessScore{makespan(load), vbf(load), pbf(load), cv(load)};
}

double reward(RewardKind kind, const LoadVector& view) {
  switch (kind) {
    case RewardKind::vbf: return vbf(view);
    case RewardKind::pbf: return pbf(view);
    case RewardKind::neg_cv: return -cv(view);
    case RewardKind::neg_makespan: return -makespan(view);
  }
  throw std::logic_error("unhandled RewardKind");
}

double potential(const std::vector<LoadVector>& trajectory) {
  double acc = 0.0;
  for (const auto& l : trajectory) acc += vbf(l);
  return acc;
}

std::size_t assign_server(const std::vector<int>& ongoing, const Action& action) {
  if (ongoing.empty() || ongoing.size() != action.weights.size())
    throw std::invalid_argument("assign_server: size mismatch");
  std::size_t best = 0;
  double best_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ongoing.size(); ++k) {
    if (ongoing[k] < 0) throw std::invalid_argument("assign_server: negative count");
    const double w = action.weights[k];
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("assign_server: weights must be positive");
    const double ratio = (static_cast<double>(ongoing[k]) + 1.0) / w;
    if (ratio < best_ratio) {
      best_ratio = ratio;
      best = k;
    }
  }
  return best;
}

std::vector<LoadVector> argmax_fairness_bruteforce(double total_work,
                                                   std::size_t n_servers,
                                                   double step, RewardKind metric,
                                                   double tol) {
  if (n_servers == 0) throw std::invalid_argument("bruteforce: no servers");
  if (!(step > 0.0)) throw std::invalid_argument("bruteforce: step must be > 0");
  const double units_real = total_work / step;
  const long long units = std::llround(units_real);
  if (units < 0 || std::abs(units_real - static_cast<double>(units)) > 1e-9)
    throw std::invalid_argument("bruteforce: total_work must be a multiple of step");

  // C(units + n - 1, n - 1) allocations; refuse instances that would blow up.
  double count = 1.0;
  for (std::size_t i = 1; i < n_servers; ++i)
    count *= static_cast<double>(units + static_cast<long long>(i)) / static_cast<double>(i);
  if (count > 2e6) throw std::invalid_argument("bruteforce: instance too large");

  LoadVector alloc(n_servers, 0.0);
  const auto enumerate = [&](auto&& visit) {
    std::function<void(std::size_t, long long)> rec = [&](std::size_t bin,
                                                          long long left) {
      if (bin + 1 == n_servers) {
        alloc[bin] = static_cast<double>(left) * step;
        visit(alloc);
        return;
      }
      for (long long u = 0; u <= left; ++u) {
        alloc[bin] = static_cast<double>(u) * step;
        rec(bin + 1, left - u);
      }
    };
    rec(0, units);
  };

  double best = -std::numeric_limits<double>::infinity();
  enumerate([&](const LoadVector& a) { best = std::max(best, reward(metric, a)); });

  const double cut = best - std::max(tol, tol * std::abs(best));
  std::vector<LoadVector> out;
  enumerate([&](const LoadVector& a) {
    if (reward(metric, a) >= cut) out.push_back(a);
  });
  return out;
}

}  // namespace marllb::lb
