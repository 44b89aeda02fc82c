#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "marllb/sim/engine.hpp"

namespace marllb::harness {

// One evaluated episode. Flow-completion stats count rejected tasks at the
// timeout value; per-tick load metrics skip the empty first tick.
struct MetricRow {
  std::string policy;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  double mean_fct = 0.0;
  double p90_fct = 0.0;
  double p99_fct = 0.0;
  double mean_makespan = 0.0;
  double mean_vbf = 0.0;
  double mean_pbf = 0.0;
  std::size_t completed = 0;
  std::size_t rejected = 0;
};

// Per-policy mean and population standard deviation over rows.
struct MetricAggregate {
  std::string policy;
  std::size_t runs = 0;
  double mean_fct = 0.0, std_fct = 0.0;
  double p90_fct = 0.0, std_p90 = 0.0;
  double p99_fct = 0.0, std_p99 = 0.0;
  double mean_makespan = 0.0, std_makespan = 0.0;
  double mean_vbf = 0.0, std_vbf = 0.0;
  double mean_pbf = 0.0, std_pbf = 0.0;
  double mean_rejected = 0.0;
};

// Nearest-rank percentile: smallest element with at least q of the mass at
// or below it. q in [0, 1]; throws std::invalid_argument on empty input.
double percentile(std::vector<double> values, double q);

MetricRow compute_metrics(const sim::SimTrace& trace, const std::string& policy,
                          std::uint64_t seed, std::uint64_t config_hash);

std::vector<MetricAggregate> aggregate(const std::vector<MetricRow>& rows);

// Six-significant-digit CSV, stable column order, re-exportable byte for
// byte after a read.
std::string metrics_csv(const std::vector<MetricRow>& rows);
std::vector<MetricRow> parse_metrics_csv(const std::string& text);
std::string aggregate_csv(const std::vector<MetricAggregate>& aggs);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace marllb::harness
