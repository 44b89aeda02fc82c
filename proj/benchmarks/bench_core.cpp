#include <benchmark/benchmark.h>

#include "marllb/lb/fairness.hpp"
#include "marllb/nn/layers.hpp"
#include "marllb/obs/observation.hpp"
#include "marllb/policy/policies.hpp"
#include "marllb/rl/learner.hpp"
#include "marllb/rng.hpp"
#include "marllb/sim/engine.hpp"

using namespace marllb;

static void BM_Vbf(benchmark::State& state) {
  Rng rng(1);
  lb::LoadVector v(state.range(0));
  for (auto& x : v) x = rng.uniform(0.0, 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(lb::vbf(v));
}
BENCHMARK(BM_Vbf)->Arg(8)->Arg(64);

static void BM_VbfDecomposition(benchmark::State& state) {
  Rng rng(2);
  lb::LoadVector a(8), b(8);
  for (auto& x : a) x = rng.uniform(0.0, 10.0);
  for (auto& x : b) x = rng.uniform(0.0, 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(lb::vbf_decomposition(a, b));
}
BENCHMARK(BM_VbfDecomposition);

static void BM_AssignServer(benchmark::State& state) {
  Rng rng(3);
  std::vector<int> q(8);
  for (auto& x : q) x = static_cast<int>(rng.uniform_int(10));
  lb::Action act;
  act.weights.assign(8, 0.125);
  for (auto _ : state) benchmark::DoNotOptimize(lb::assign_server(q, act));
}
BENCHMARK(BM_AssignServer);

static void BM_ReservoirInsert(benchmark::State& state) {
  Rng rng(4);
  obs::ReservoirBuffer buf(16);
  double t = 0.0;
  for (auto _ : state) {
    buf.insert({t, 1.0}, rng);
    t += 0.1;
  }
}
BENCHMARK(BM_ReservoirInsert);

static void BM_ReduceStats(benchmark::State& state) {
  Rng rng(5);
  std::vector<obs::Sample> samples;
  for (int i = 0; i < 16; ++i)
    samples.push_back({rng.uniform(0.0, 60.0), rng.uniform(0.5, 3.0)});
  for (auto _ : state)
    benchmark::DoNotOptimize(obs::reduce_stats(samples, 60.0));
}
BENCHMARK(BM_ReduceStats);

static void BM_BuildObservation(benchmark::State& state) {
  Rng rng(6);
  obs::AgentChannels ch(8, 16, 16, 16);
  for (int i = 0; i < 200; ++i) {
    const std::size_t j = rng.uniform_int(8);
    ch.duration[j].insert({i * 0.1, rng.uniform(0.5, 2.0)}, rng);
    ch.tct[j].insert({i * 0.1, rng.uniform(0.5, 4.0)}, rng);
    ch.interarrival.insert({i * 0.1, rng.uniform(0.0, 0.5)}, rng);
  }
  obs::ObservationScaling sc;
  sc.count_scale.assign(8, 1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(obs::build_observation(ch, 20.0, sc));
}
BENCHMARK(BM_BuildObservation);

static void BM_GruForward(benchmark::State& state) {
  Rng rng(7);
  const std::size_t in = 101, hidden = static_cast<std::size_t>(state.range(0));
  nn::GruParams gru = nn::make_gru(in, hidden);
  nn::init_gru(gru, rng);
  std::vector<double> x(in), h(hidden, 0.0);
  for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  for (auto _ : state) {
    h = nn::gru_forward(gru, x, h);
    benchmark::DoNotOptimize(h.data());
  }
}
BENCHMARK(BM_GruForward)->Arg(32)->Arg(64);

static void BM_GruBackward(benchmark::State& state) {
  Rng rng(8);
  const std::size_t in = 101, hidden = static_cast<std::size_t>(state.range(0));
  nn::GruParams gru = nn::make_gru(in, hidden);
  nn::init_gru(gru, rng);
  std::vector<double> x(in), h(hidden, 0.0), dh(hidden, 1.0);
  for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  nn::GruCache cache;
  for (auto _ : state) {
    auto h2 = nn::gru_forward(gru, x, h, &cache);
    std::vector<double> dx(in, 0.0);
    benchmark::DoNotOptimize(nn::gru_backward(gru, cache, dh, &dx));
  }
}
BENCHMARK(BM_GruBackward)->Arg(32)->Arg(64);

static void BM_SacUpdate(benchmark::State& state) {
  rl::LearnerConfig cfg;
  cfg.obs_dim = 101;
  cfg.n_actions = 8;
  cfg.hidden = 64;
  rl::AgentLearner learner(cfg, 9, 0);
  Rng rng(10);
  for (std::uint64_t ep = 0; ep < 5; ++ep) {
    for (std::size_t step = 0; step < 30; ++step) {
      rl::TransitionRecord rec;
      rec.prev_action.assign(cfg.n_actions, 0.0);
      rec.obs.resize(cfg.obs_dim);
      for (auto& v : rec.obs) v = rng.uniform(-1.0, 1.0);
      rec.action.resize(cfg.n_actions);
      for (auto& v : rec.action) v = rng.uniform(-0.9, 0.9);
      rec.reward = rng.uniform(-2.0, 0.0);
      rec.next_obs = rec.obs;
      rec.episode = ep;
      rec.step = step;
      learner.buffer().push(std::move(rec));
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(learner.update_once());
}
BENCHMARK(BM_SacUpdate)->Unit(benchmark::kMillisecond);

static void BM_Episode(benchmark::State& state) {
  sim::EpisodeConfig cfg;
  cfg.servers = {{2, 2, 1.0, true}, {2, 2, 1.0, true}, {1, 1, 1.0, true},
                 {1, 1, 1.0, true}};
  cfg.n_agents = 2;
  cfg.profile = sim::make_profile("cpu100", 1.0, 4.2);
  cfg.duration = 30.0;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    std::vector<std::shared_ptr<sim::AgentPolicy>> fleet{
        policy::make_baseline(policy::Kind::sed),
        policy::make_baseline(policy::Kind::sed)};
    benchmark::DoNotOptimize(sim::run_episode(cfg, fleet, seed++));
  }
}
BENCHMARK(BM_Episode)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
