#include "marllb/harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "marllb/lb/fairness.hpp"

namespace marllb::harness {
namespace {

std::string g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Population standard deviation; a single run reports zero spread.
double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile: empty input");
  if (!(q >= 0.0) || q > 1.0) throw std::invalid_argument("percentile: q outside [0, 1]");
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  if (rank == 0) rank = 1;
  if (rank > n) rank = n;
  return values[rank - 1];
}

MetricRow compute_metrics(const sim::SimTrace& trace, const std::string& policy,
                          std::uint64_t seed, std::uint64_t config_hash) {
  MetricRow row;
  row.policy = policy;
  row.seed = seed;
  row.config_hash = config_hash;
  row.completed = static_cast<std::size_t>(trace.completed);
  row.rejected = static_cast<std::size_t>(trace.rejected);

  std::vector<double> fct = trace.fct_values();
  if (!fct.empty()) {
    row.mean_fct = mean_of(fct);
    row.p90_fct = percentile(fct, 0.90);
    row.p99_fct = percentile(fct, 0.99);
  }

  // The first tick observes an empty cluster; it carries no load signal.
  std::vector<double> mk, vb, pb;
  for (const auto& tick : trace.ticks) {
    if (tick.index == 0) continue;
    mk.push_back(lb::makespan(tick.load));
    vb.push_back(lb::vbf(tick.load));
    pb.push_back(lb::pbf(tick.load));
  }
  row.mean_makespan = mean_of(mk);
  row.mean_vbf = mean_of(vb);
  row.mean_pbf = mean_of(pb);
  return row;
}

std::vector<MetricAggregate> aggregate(const std::vector<MetricRow>& rows) {
  std::map<std::string, std::vector<const MetricRow*>> by_policy;
  std::vector<std::string> order;
  for (const auto& r : rows) {
    if (by_policy.find(r.policy) == by_policy.end()) order.push_back(r.policy);
    by_policy[r.policy].push_back(&r);
  }
  std::vector<MetricAggregate> out;
  for (const auto& name : order) {
    const auto& group = by_policy[name];
    std::vector<double> mf, p90, p99, mk, vb, pb, rej;
    for (const MetricRow* r : group) {
      mf.push_back(r->mean_fct);
      p90.push_back(r->p90_fct);
      p99.push_back(r->p99_fct);
      mk.push_back(r->mean_makespan);
      vb.push_back(r->mean_vbf);
      pb.push_back(r->mean_pbf);
      rej.push_back(static_cast<double>(r->rejected));
    }
    MetricAggregate a;
    a.policy = name;
    a.runs = group.size();
    a.mean_fct = mean_of(mf);
    a.std_fct = std_of(mf);
    a.p90_fct = mean_of(p90);
    a.std_p90 = std_of(p90);
    a.p99_fct = mean_of(p99);
    a.std_p99 = std_of(p99);
    a.mean_makespan = mean_of(mk);
    a.std_makespan = std_of(mk);
    a.mean_vbf = mean_of(vb);
    a.std_vbf = std_of(vb);
    a.mean_pbf = mean_of(pb);
    a.std_pbf = std_of(pb);
    a.mean_rejected = mean_of(rej);
    out.push_back(std::move(a));
  }
  return out;
}

std::string metrics_csv(const std::vector<MetricRow>& rows) {
  std::ostringstream out;
  out << "policy,seed,config_hash,mean_fct,p90_fct,p99_fct,mean_makespan,"
         "mean_vbf,mean_pbf,completed,rejected\n";
  for (const auto& r : rows) {
    out << r.policy << ',' << r.seed << ',' << r.config_hash << ','
        << g6(r.mean_fct) << ',' << g6(r.p90_fct) << ',' << g6(r.p99_fct) << ','
        << g6(r.mean_makespan) << ',' << g6(r.mean_vbf) << ','
        << g6(r.mean_pbf) << ',' << r.completed << ',' << r.rejected << '\n';
  }
  return out.str();
}

std::vector<MetricRow> parse_metrics_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("metrics csv: empty");
  const std::string header =
      "policy,seed,config_hash,mean_fct,p90_fct,p99_fct,mean_makespan,"
      "mean_vbf,mean_pbf,completed,rejected";
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw std::invalid_argument("metrics csv: bad header");
  std::vector<MetricRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_line(line);
    if (f.size() != 11) throw std::invalid_argument("metrics csv: bad row");
    MetricRow r;
    r.policy = f[0];
    r.seed = std::stoull(f[1]);
    r.config_hash = std::stoull(f[2]);
    r.mean_fct = std::stod(f[3]);
    r.p90_fct = std::stod(f[4]);
    r.p99_fct = std::stod(f[5]);
    r.mean_makespan = std::stod(f[6]);
    r.mean_vbf = std::stod(f[7]);
    r.mean_pbf = std::stod(f[8]);
    r.completed = std::stoull(f[9]);
    r.rejected = std::stoull(f[10]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string aggregate_csv(const std::vector<MetricAggregate>& aggs) {
  std::ostringstream out;
  out << "policy,runs,mean_fct,std_fct,p90_fct,std_p90,p99_fct,std_p99,"
         "mean_makespan,std_makespan,mean_vbf,std_vbf,mean_pbf,std_pbf,"
         "mean_rejected\n";
  for (const auto& a : aggs) {
    out << a.policy << ',' << a.runs << ',' << g6(a.mean_fct) << ','
        << g6(a.std_fct) << ',' << g6(a.p90_fct) << ',' << g6(a.std_p90) << ','
        << g6(a.p99_fct) << ',' << g6(a.std_p99) << ',' << g6(a.mean_makespan)
        << ',' << g6(a.std_makespan) << ',' << g6(a.mean_vbf) << ','
        << g6(a.std_vbf) << ',' << g6(a.mean_pbf) << ',' << g6(a.std_pbf)
        << ',' << g6(a.mean_rejected) << '\n';
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace marllb::harness
