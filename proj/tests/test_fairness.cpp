#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "marllb/lb/fairness.hpp"
#include "marllb/rng.hpp"

using namespace marllb;
using lb::LoadVector;

namespace {

LoadVector random_load(Rng& rng, std::size_t n, double scale) {
  LoadVector v(n);
  for (auto& x : v) x = rng.uniform(0.0, scale);
  return v;
}

// Canonical key for comparing allocation sets from the brute-force oracle.
std::multiset<std::vector<long long>> allocation_set(
    const std::vector<LoadVector>& allocs, double step) {
  std::multiset<std::vector<long long>> out;
  for (const auto& a : allocs) {
    std::vector<long long> key;
    key.reserve(a.size());
    for (double v : a) key.push_back(std::llround(v / step));
    out.insert(key);
  }
  return out;
}

}  // namespace

TEST_CASE("makespan is the max entry") {
  CHECK(lb::makespan({1.0, 3.0, 2.0}) == 3.0);
  CHECK(lb::makespan({0.0}) == 0.0);
  CHECK_THROWS_AS(lb::makespan({}), std::invalid_argument);
  CHECK_THROWS_AS(lb::makespan({1.0, std::nan("")}), std::invalid_argument);
}

TEST_CASE("vbf is zero iff balanced, negative otherwise") {
  CHECK(lb::vbf({2.5, 2.5, 2.5}) == 0.0);
  CHECK(lb::vbf({0.0, 2.0}) == doctest::Approx(-1.0));
  Rng rng(7);
  for (int it = 0; it < 1000; ++it) {
    auto v = random_load(rng, 2 + it % 6, 10.0);
    CHECK(lb::vbf(v) <= 0.0);
    const double c = rng.uniform(-5.0, 5.0);
    auto shifted = v;
    for (auto& x : shifted) x += c;
    CHECK(lb::vbf(shifted) == doctest::Approx(lb::vbf(v)).epsilon(1e-9));
    LoadVector flat(v.size(), v[0]);
    CHECK(lb::vbf(flat) == 0.0);
  }
}

TEST_CASE("vbf decomposition identity is exact") {
  Rng rng(11);
  double worst = 0.0;
  for (int it = 0; it < 10000; ++it) {
    const std::size_t n = 2 + it % 7;
    const auto a = random_load(rng, n, 100.0);
    const auto b = random_load(rng, n, 100.0);
    const auto d = lb::vbf_decomposition(a, b);
    const double rebuilt = d.part_a + d.part_b - 2.0 * d.covariance;
    worst = std::max(worst, std::abs(d.total - rebuilt));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("vbf decomposition matches per-agent rows") {
  lb::PerAgentLoad split(2, 4);
  Rng rng(3);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 4; ++j) split.at(i, j) = rng.uniform(0.0, 5.0);
  const auto d = lb::vbf_decomposition(split.row(0), split.row(1));
  CHECK(d.part_a == doctest::Approx(lb::per_agent_vbf(split, 0)));
  CHECK(d.part_b == doctest::Approx(lb::per_agent_vbf(split, 1)));
  CHECK(d.total == doctest::Approx(lb::vbf(split.column_sums())));
}

TEST_CASE("cross term vanishes only for uncorrelated rows") {
  // Identical rows: variance quadruples, so the naive sum of parts is off by
  // exactly the covariance correction.
  const LoadVector a{1.0, 2.0, 5.0};
  const auto d = lb::vbf_decomposition(a, a);
  CHECK(d.total == doctest::Approx(4.0 * d.part_a));
  CHECK(d.covariance == doctest::Approx(-d.part_a));  // cov(a,a) = var(a)
  CHECK(d.total != doctest::Approx(d.part_a + d.part_b).epsilon(1e-12));
}

TEST_CASE("pbf scaling, idle-server zero, uniform closed form") {
  const LoadVector v{1.0, 2.0, 4.0};
  CHECK(lb::pbf(v) == doctest::Approx(2.0));  // 8 / 4
  Rng rng(13);
  for (int it = 0; it < 200; ++it) {
    auto l = random_load(rng, 2 + it % 5, 3.0);
    const double c = rng.uniform(0.1, 4.0);
    auto scaled = l;
    for (auto& x : scaled) x *= c;
    const double expect = std::pow(c, static_cast<double>(l.size() - 1)) * lb::pbf(l);
    CHECK(lb::pbf(scaled) == doctest::Approx(expect).epsilon(1e-9));
  }
  CHECK(lb::pbf({3.0, 0.0, 2.0}) == 0.0);
  CHECK(lb::pbf({0.0, 0.0}) == 0.0);
  const LoadVector flat(5, 1.7);
  CHECK(lb::pbf(flat) == doctest::Approx(std::pow(1.7, 4)));
  CHECK_THROWS_AS(lb::pbf({-1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("cv is scale invariant and zero on balance") {
  CHECK(lb::cv({4.0, 4.0}) == 0.0);
  CHECK(lb::cv({0.0, 0.0}) == 0.0);
  Rng rng(17);
  for (int it = 0; it < 200; ++it) {
    auto l = random_load(rng, 3, 5.0);
    l[0] += 0.01;  // keep the mean away from zero
    auto scaled = l;
    for (auto& x : scaled) x *= 3.25;
    CHECK(lb::cv(scaled) == doctest::Approx(lb::cv(l)).epsilon(1e-9));
  }
}

TEST_CASE("reward orientation: higher is better under every kind") {
  const LoadVector bad{9.0, 1.0, 1.0, 1.0};
  const LoadVector good{3.0, 3.0, 3.0, 3.0};
  for (auto kind : {lb::RewardKind::vbf, lb::RewardKind::pbf, lb::RewardKind::neg_cv,
                    lb::RewardKind::neg_makespan}) {
    CHECK(lb::reward(kind, good) > lb::reward(kind, bad));
  }
}

TEST_CASE("potential accumulates vbf and splits per agent plus correction") {
  Rng rng(23);
  const std::size_t n = 5, steps = 40;
  std::vector<LoadVector> joint;
  std::vector<LoadVector> row_a, row_b;
  for (std::size_t t = 0; t < steps; ++t) {
    auto a = random_load(rng, n, 4.0);
    auto b = random_load(rng, n, 4.0);
    LoadVector sum(n);
    for (std::size_t j = 0; j < n; ++j) sum[j] = a[j] + b[j];
    joint.push_back(sum);
    row_a.push_back(a);
    row_b.push_back(b);
  }
  double split_sum = 0.0;
  for (std::size_t t = 0; t < steps; ++t) {
    const auto d = lb::vbf_decomposition(row_a[t], row_b[t]);
    split_sum += d.part_a + d.part_b - 2.0 * d.covariance;
  }
  CHECK(lb::potential(joint) == doctest::Approx(split_sum).epsilon(1e-12));
}

TEST_CASE("assign_server follows the weighted shortest-queue rule") {
  // Ratios (3+1)/0.5 = 8, (1+1)/0.25 = 8, (2+1)/0.25 = 12: tie on the first
  // two, lowest index wins.
  CHECK(lb::assign_server({3, 1, 2}, lb::Action{{0.5, 0.25, 0.25}}) == 0);
  CHECK(lb::assign_server({5, 0, 3}, lb::Action{{0.2, 0.2, 0.6}}) == 1);

  Rng rng(29);
  for (int it = 0; it < 500; ++it) {
    const std::size_t n = 2 + it % 6;
    std::vector<int> q(n);
    for (auto& x : q) x = static_cast<int>(rng.uniform_int(20));
    lb::Action a;
    a.weights.resize(n);
    for (auto& w : a.weights) w = rng.uniform(0.05, 2.0);
    const auto pick = lb::assign_server(q, a);
    auto scaled = a;
    const double c = rng.uniform(0.1, 50.0);
    for (auto& w : scaled.weights) w *= c;
    CHECK(lb::assign_server(q, scaled) == pick);
  }
  CHECK_THROWS_AS(lb::assign_server({1, 2}, lb::Action{{1.0, 0.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(lb::assign_server({1}, lb::Action{{1.0, 1.0}}),
                  std::invalid_argument);
}

TEST_CASE("brute force: balanced allocations maximise vbf and minimise makespan") {
  // Unit grids up to 12 work units on up to 4 servers; the exhaustive argmax
  // sets are the authority the optimisation claims are checked against.
  for (std::size_t n = 2; n <= 4; ++n) {
    for (int total = 1; total <= 12; ++total) {
      const auto vbf_best = lb::argmax_fairness_bruteforce(total, n, 1.0,
                                                           lb::RewardKind::vbf);
      const auto ms_best = lb::argmax_fairness_bruteforce(
          total, n, 1.0, lb::RewardKind::neg_makespan);
      const auto ms_set = allocation_set(ms_best, 1.0);
      for (const auto& a : vbf_best) {
        std::vector<long long> key;
        for (double v : a) key.push_back(std::llround(v));
        CHECK(ms_set.count(key) == 1);
      }
      // Balanced-as-possible structure: entries differ by at most one unit.
      for (const auto& a : vbf_best) {
        const auto [mn, mx] = std::minmax_element(a.begin(), a.end());
        CHECK(*mx - *mn <= 1.0 + 1e-9);
      }
    }
  }
}

TEST_CASE("brute force: pbf argmax sits inside the makespan argmin when positive") {
  for (std::size_t n = 2; n <= 4; ++n) {
    for (int total = static_cast<int>(n); total <= 12; ++total) {
      const auto pbf_best = lb::argmax_fairness_bruteforce(total, n, 1.0,
                                                           lb::RewardKind::pbf);
      const double best_val = lb::pbf(pbf_best.front());
      if (best_val <= 0.0) continue;  // degenerate grid, argmax is everything
      const auto ms_best = lb::argmax_fairness_bruteforce(
          total, n, 1.0, lb::RewardKind::neg_makespan);
      const auto ms_set = allocation_set(ms_best, 1.0);
      for (const auto& a : pbf_best) {
        std::vector<long long> key;
        for (double v : a) key.push_back(std::llround(v));
        CHECK(ms_set.count(key) == 1);
      }
    }
  }
}

TEST_CASE("brute force guards") {
  CHECK_THROWS_AS(lb::argmax_fairness_bruteforce(1.5, 3, 1.0, lb::RewardKind::vbf),
                  std::invalid_argument);
  CHECK_THROWS_AS(lb::argmax_fairness_bruteforce(500, 8, 0.25, lb::RewardKind::vbf),
                  std::invalid_argument);
  const auto out = lb::argmax_fairness_bruteforce(2.0, 2, 0.5, lb::RewardKind::vbf);
  REQUIRE(out.size() == 1);
  CHECK(out.front()[0] == doctest::Approx(1.0));
  CHECK(out.front()[1] == doctest::Approx(1.0));
}
