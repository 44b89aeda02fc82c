#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "marllb/policy/policies.hpp"
#include "marllb/sim/engine.hpp"

using namespace marllb;
using namespace marllb::policy;

namespace {

sim::EpisodeConfig cluster(double rate, double duration) {
  sim::EpisodeConfig cfg;
  cfg.servers = {{2, 2, 1.0, true}, {2, 2, 1.0, true}, {1, 1, 1.0, true},
                 {1, 1, 1.0, true}};
  cfg.n_agents = 2;
  cfg.profile = sim::make_profile("cpu100", 1.0, rate);
  cfg.duration = duration;
  cfg.tick = 0.5;
  return cfg;
}

std::vector<std::shared_ptr<sim::AgentPolicy>> fleet(Kind kind, std::size_t m) {
  std::vector<std::shared_ptr<sim::AgentPolicy>> out;
  for (std::size_t i = 0; i < m; ++i) out.push_back(make_baseline(kind));
  return out;
}

double mean_fct(const sim::SimTrace& trace) {
  const auto v = trace.fct_values();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("ecmp picks uniformly") {
  Rng rng(1);
  const std::size_t n = 6;
  std::vector<int> counts(n, 0);
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) counts[ecmp_pick(n, rng)]++;
  const double expect = static_cast<double>(draws) / n;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
  CHECK(chi2 < 15.0863);  // 99th percentile, 5 degrees of freedom
}

TEST_CASE("wcmp splits proportionally to weights") {
  Rng rng(2);
  const std::vector<double> w{1.0, 2.0, 3.0};
  std::vector<int> counts(3, 0);
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) counts[wcmp_pick(w, rng)]++;
  for (std::size_t k = 0; k < 3; ++k) {
    const double p = static_cast<double>(counts[k]) / draws;
    const double expect = w[k] / 6.0;
    CHECK(std::abs(p - expect) < 4.0 * std::sqrt(expect * (1 - expect) / draws));
  }
  CHECK_THROWS_AS(wcmp_pick({1.0, 0.0}, rng), std::invalid_argument);
  CHECK_THROWS_AS(wcmp_pick({}, rng), std::invalid_argument);
}

TEST_CASE("lsq takes the least ongoing count, lowest index on ties") {
  CHECK(lsq_pick({3, 1, 2}) == 1);
  CHECK(lsq_pick({2, 1, 1}) == 1);
  CHECK(lsq_pick({0, 0, 0}) == 0);
}

TEST_CASE("sed weighs queue depth against capacity") {
  // Empty queues: the faster server wins outright.
  CHECK(sed_pick({0, 0}, {2.0, 1.0}) == 0);
  // (3+1)/2 = 2 vs (0+1)/1 = 1: the idle slow server is quicker now.
  CHECK(sed_pick({3, 0}, {2.0, 1.0}) == 1);
  // Rescaling weights changes nothing.
  CHECK(sed_pick({5, 2, 9}, {1.0, 0.5, 2.0}) ==
        sed_pick({5, 2, 9}, {10.0, 5.0, 20.0}));
}

TEST_CASE("nominal weights multiply rate by CPU count") {
  const auto w = nominal_weights({{2, 2, 1.0, true}, {1, 1, 0.5, true}});
  REQUIRE(w.size() == 2);
  CHECK(w[0] == doctest::Approx(2.0));
  CHECK(w[1] == doctest::Approx(0.5));
}

TEST_CASE("uniform weighted dispatch reproduces lsq exactly") {
  const auto cfg = cluster(3.0, 20.0);
  auto rl = std::vector<std::shared_ptr<sim::AgentPolicy>>{
      std::make_shared<WeightedDispatchPolicy>(),
      std::make_shared<WeightedDispatchPolicy>()};
  const auto a = sim::run_episode(cfg, rl, 5);
  const auto b = sim::run_episode(cfg, fleet(Kind::lsq, 2), 5);
  CHECK(a.hash() == b.hash());
}

TEST_CASE("dispatch action must be strictly positive") {
  WeightedDispatchPolicy p;
  CHECK_THROWS_AS(p.set_action({0.5, 0.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(p.set_action({0.5, -0.1, 0.6}), std::invalid_argument);
  p.set_action({0.25, 0.25, 0.5});
  REQUIRE(p.current_action() != nullptr);
  CHECK((*p.current_action())[2] == doctest::Approx(0.5));
}

TEST_CASE("oracle beats the blind baselines on a heterogeneous cluster") {
  for (std::uint64_t seed : {101ull, 102ull, 103ull}) {
    const auto cfg = cluster(4.2, 40.0);  // rho = 0.7
    const double oracle = mean_fct(sim::run_episode(cfg, fleet(Kind::oracle, 2), seed));
    const double ecmp = mean_fct(sim::run_episode(cfg, fleet(Kind::ecmp, 2), seed));
    const double lsq = mean_fct(sim::run_episode(cfg, fleet(Kind::lsq, 2), seed));
    CHECK(oracle <= ecmp + 1e-9);
    CHECK(oracle <= lsq + 1e-9);
  }
}

TEST_CASE("sed exploits capacity asymmetry that lsq ignores") {
  // 2-CPU servers drain twice as fast; weighting by capacity must help on
  // average over a few seeds.
  double sed_total = 0.0, ecmp_total = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto cfg = cluster(4.2, 40.0);
    sed_total += mean_fct(sim::run_episode(cfg, fleet(Kind::sed, 2), seed));
    ecmp_total += mean_fct(sim::run_episode(cfg, fleet(Kind::ecmp, 2), seed));
  }
  CHECK(sed_total < ecmp_total);
}

TEST_CASE("policy factory rejects the learner kind") {
  CHECK_THROWS_AS(make_baseline(Kind::rl), std::invalid_argument);
  CHECK(kind_from_string("sed") == Kind::sed);
  CHECK_THROWS_AS(kind_from_string("steal"), std::invalid_argument);
  CHECK(to_string(Kind::oracle) == "oracle");
}
