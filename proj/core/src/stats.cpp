#include "marllb/obs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace marllb::obs {

SampleStats reduce_stats(std::vector<Sample> samples, double now, double decay) {
  if (!(decay > 0.0) || !(decay <= 1.0))
    throw std::invalid_argument("reduce_stats: decay must be in (0, 1]");
  SampleStats out;
  if (samples.empty()) return out;

  std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) {
    return a.t != b.t ? a.t < b.t : a.value < b.value;
  });
  const std::size_t n = samples.size();

  double sum = 0.0;
  for (const auto& s : samples) sum += s.value;
  out.mean = sum / static_cast<double>(n);

  double var = 0.0;
  for (const auto& s : samples) var += (s.value - out.mean) * (s.value - out.mean);
  out.stddev = std::sqrt(var / static_cast<double>(n));

  std::vector<double> by_value(n);
  for (std::size_t i = 0; i < n; ++i) by_value[i] = samples[i].value;
  std::sort(by_value.begin(), by_value.end());
  const std::size_t rank =
      static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(n)));
  out.p90 = by_value[rank == 0 ? 0 : rank - 1];

  double dnum = 0.0, dden = 0.0, wnum = 0.0, wden = 0.0;
  double prev_t = samples.front().t;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = std::pow(decay, now - samples[i].t);
    const double gap = i == 0 ? 1.0 : samples[i].t - prev_t;
    prev_t = samples[i].t;
    dnum += w * samples[i].value;
    dden += w;
    wnum += w * gap * samples[i].value;
    wden += w * gap;
  }
  out.discounted = dnum / dden;
  out.weighted = wden > 0.0 ? wnum / wden : out.discounted;
  return out;
}

}  // namespace marllb::obs
