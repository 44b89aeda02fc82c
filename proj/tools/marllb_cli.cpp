// Experiment driver: run baseline or learned dispatch episodes, train the
// learners, probe the analytic chain, sweep a config key, re-aggregate saved
// metrics. Every artifact is stamped with the canonical config hash so runs
// can be joined and checkpoints cannot silently cross configurations.
//
// Exit codes: 0 ok, 2 bad experiment description (schema, names, seed
// ranges, missing or mismatched checkpoints), 3 runtime failure. Errors go
// to stderr as one JSON record.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "marllb/harness/experiment.hpp"
#include "marllb/harness/metrics.hpp"
#include "marllb/markov/chain.hpp"
#include "marllb/policy/policies.hpp"
#include "marllb/rl/trainer.hpp"

namespace {

using marllb::harness::ConfigError;
using marllb::harness::ExperimentConfig;

int fail_json(const char* kind, const std::string& message, int code) {
  nlohmann::json rec{{"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << rec.dump() << "\n";
  return code;
}

struct SeedRange {
  std::uint64_t lo = 1;
  std::uint64_t hi = 1;

  std::vector<std::uint64_t> expand() const {
    std::vector<std::uint64_t> out;
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
    return out;
  }
};

SeedRange parse_seeds(const std::string& text) {
  SeedRange r;
  auto pos = text.find("..");
  try {
    if (pos == std::string::npos) {
      r.lo = r.hi = std::stoull(text);
    } else {
      r.lo = std::stoull(text.substr(0, pos));
      r.hi = std::stoull(text.substr(pos + 2));
    }
  } catch (const std::exception&) {
    throw ConfigError("bad seed range \"" + text + "\", expected N or A..B");
  }
  if (r.lo > r.hi) throw ConfigError("empty seed range \"" + text + "\"");
  if (r.hi - r.lo > 100000) throw ConfigError("seed range too large");
  return r;
}

struct ConfigArgs {
  std::string config_path;
  std::string preset;
  std::string policy;
  std::string out_dir;
  std::vector<std::string> sets;  // key=value pairs

  void attach(CLI::App* cmd, bool with_policy = true) {
    cmd->add_option("--config", config_path, "Experiment JSON file");
    cmd->add_option("--preset", preset, "Built-in preset (cpu100, cpu75, cpu50)");
    if (with_policy)
      cmd->add_option("--policy", policy, "Dispatch policy override");
    cmd->add_option("--out", out_dir, "Output directory override");
    cmd->add_option("--set", sets, "Override a config key, key=value")
        ->take_all();
  }

  // All overrides go through the JSON text, so the canonical hash covers them.
  std::string resolved_text() const {
    std::string text;
    if (!config_path.empty()) {
      try {
        text = marllb::harness::read_text_file(config_path);
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
    } else if (!preset.empty())
      text = "{\"preset\": \"" + preset + "\"}";
    else
      throw ConfigError("need --config or --preset");
    for (const auto& kv : sets) {
      auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0)
        throw ConfigError("bad --set \"" + kv + "\", expected key=value");
      text = marllb::harness::override_key(text, kv.substr(0, eq),
                                           kv.substr(eq + 1));
    }
    if (!policy.empty())
      text = marllb::harness::override_key(text, "policy", policy);
    if (!out_dir.empty())
      text = marllb::harness::override_key(text, "output.dir", out_dir);
    return text;
  }

  ExperimentConfig resolve() const {
    return marllb::harness::parse_config(resolved_text());
  }
};

marllb::policy::Kind baseline_kind(const std::string& name) {
  marllb::policy::Kind kind;
  try {
    kind = marllb::policy::kind_from_string(name);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (kind == marllb::policy::Kind::rl)
    throw ConfigError("policy \"rl\" needs trained checkpoints, use evaluate");
  return kind;
}

std::vector<marllb::harness::MetricRow> run_baseline_episodes(
    const ExperimentConfig& cfg, const SeedRange& seeds,
    const std::string& label_suffix = "") {
  auto kind = baseline_kind(cfg.policy);
  std::uint64_t hash = marllb::harness::config_hash(cfg);
  std::vector<marllb::harness::MetricRow> rows;
  for (std::uint64_t seed : seeds.expand()) {
    std::vector<std::shared_ptr<marllb::sim::AgentPolicy>> fleet;
    for (std::size_t i = 0; i < cfg.episode.n_agents; ++i)
      fleet.push_back(marllb::policy::make_baseline(kind));
    auto trace = marllb::sim::run_episode(cfg.episode, fleet, seed);
    rows.push_back(marllb::harness::compute_metrics(
        trace, cfg.policy + label_suffix, seed, hash));
  }
  return rows;
}

void write_run_artifacts(const ExperimentConfig& cfg,
                         const std::vector<marllb::harness::MetricRow>& rows) {
  namespace h = marllb::harness;
  h::write_text_file(cfg.output_dir + "/config.json", h::canonical_text(cfg) + "\n");
  h::write_text_file(cfg.output_dir + "/metrics.csv", h::metrics_csv(rows));
  h::write_text_file(cfg.output_dir + "/aggregate.csv",
                     h::aggregate_csv(h::aggregate(rows)));
}

int cmd_simulate(const ConfigArgs& args, const std::string& seeds_text) {
  auto cfg = args.resolve();
  auto rows = run_baseline_episodes(cfg, parse_seeds(seeds_text));
  write_run_artifacts(cfg, rows);
  std::cout << marllb::harness::aggregate_csv(marllb::harness::aggregate(rows));
  return 0;
}

int cmd_train(const ConfigArgs& args, std::uint64_t seed) {
  namespace h = marllb::harness;
  auto cfg = args.resolve();
  std::uint64_t hash = h::config_hash(cfg);
  marllb::rl::Trainer trainer(h::trainer_config(cfg, seed));
  trainer.run();
  h::write_text_file(cfg.output_dir + "/config.json", h::canonical_text(cfg) + "\n");
  trainer.write_curve_csv(cfg.output_dir + "/curve.csv");
  trainer.save_checkpoints(cfg.output_dir + "/checkpoints", hash);
  const auto& curve = trainer.curve();
  std::size_t agents = trainer.learners().size();
  std::cout << "trained " << trainer.episodes_done() << " episodes, " << agents
            << " agents, config " << hash << "\n";
  for (std::size_t i = curve.size() >= agents ? curve.size() - agents : 0;
       i < curve.size(); ++i)
    std::cout << "agent " << curve[i].agent << " final mean reward "
              << curve[i].mean_reward << " alpha " << curve[i].alpha << "\n";
  std::cout << "checkpoints: " << cfg.output_dir << "/checkpoints\n";
  return 0;
}

int cmd_evaluate(const ConfigArgs& args, const std::string& seeds_text,
                 std::string checkpoints_dir, bool stochastic) {
  namespace h = marllb::harness;
  auto cfg = args.resolve();
  std::uint64_t hash = h::config_hash(cfg);
  if (checkpoints_dir.empty()) checkpoints_dir = cfg.output_dir + "/checkpoints";
  marllb::rl::Trainer trainer(h::trainer_config(cfg, 1));
  std::uint64_t stored = 0;
  try {
    stored = trainer.load_checkpoints(checkpoints_dir);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("checkpoints: ") + e.what());
  }
  if (stored != hash)
    throw ConfigError("checkpoint config " + std::to_string(stored) +
                      " does not match experiment config " + std::to_string(hash));
  auto& learners = trainer.learners();
  std::vector<marllb::harness::MetricRow> rows;
  for (std::uint64_t seed : parse_seeds(seeds_text).expand()) {
    std::vector<std::shared_ptr<marllb::sim::AgentPolicy>> fleet;
    for (auto& learner : learners)
      fleet.push_back(std::make_shared<marllb::rl::RlDispatchPolicy>(
          learner, !stochastic, false));
    auto trace = marllb::sim::run_episode(cfg.episode, fleet, seed);
    rows.push_back(h::compute_metrics(trace, "rl", seed, hash));
  }
  write_run_artifacts(cfg, rows);
  std::cout << h::aggregate_csv(h::aggregate(rows));
  return 0;
}

int cmd_analytic(const std::string& policy, const std::string& scenario,
                 int q_cap, bool sweep, const std::string& out_path) {
  namespace mk = marllb::markov;
  std::ostringstream out;
  out << "policy,scenario,mean_service_duration\n";
  char buf[64];
  if (sweep) {
    for (const auto& cell : mk::scenario_sweep(q_cap)) {
      std::snprintf(buf, sizeof(buf), "%.6g", cell.metric);
      out << mk::to_string(cell.policy) << ',' << mk::to_string(cell.preset)
          << ',' << buf << '\n';
    }
  } else {
    mk::ChainConfig cfg;
    try {
      cfg = mk::make_scenario(mk::chain_policy_from_string(policy),
                              mk::scenario_preset_from_string(scenario), q_cap);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    auto dist = mk::stationary(mk::build_transition(cfg));
    double metric = mk::weighted_service_duration(dist, cfg.v1, cfg.v2);
    std::snprintf(buf, sizeof(buf), "%.6g", metric);
    out << policy << ',' << scenario << ',' << buf << '\n';
  }
  std::cout << out.str();
  if (!out_path.empty()) marllb::harness::write_text_file(out_path, out.str());
  return 0;
}

int cmd_sweep(const ConfigArgs& args, const std::string& seeds_text,
              const std::string& key, const std::vector<std::string>& values) {
  namespace h = marllb::harness;
  if (key.empty() || values.empty())
    throw ConfigError("sweep needs --key and --values");
  std::string base = args.resolved_text();
  SeedRange seeds = parse_seeds(seeds_text);
  std::vector<h::MetricRow> rows;
  std::ostringstream index;
  index << "key,value,config_hash\n";
  std::string out_dir;
  for (const auto& value : values) {
    auto cfg = h::parse_config(h::override_key(base, key, value));
    out_dir = cfg.output_dir;
    index << key << ',' << value << ',' << h::config_hash(cfg) << '\n';
    auto part = run_baseline_episodes(cfg, seeds, "[" + key + "=" + value + "]");
    rows.insert(rows.end(), part.begin(), part.end());
  }
  h::write_text_file(out_dir + "/metrics.csv", h::metrics_csv(rows));
  h::write_text_file(out_dir + "/sweep.csv", index.str());
  h::write_text_file(out_dir + "/aggregate.csv",
                     h::aggregate_csv(h::aggregate(rows)));
  std::cout << h::aggregate_csv(h::aggregate(rows));
  return 0;
}

int cmd_report(const std::string& in_path, const std::string& out_path) {
  namespace h = marllb::harness;
  std::string text;
  try {
    text = h::read_text_file(in_path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  std::vector<h::MetricRow> rows;
  try {
    rows = h::parse_metrics_csv(text);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  std::string agg = h::aggregate_csv(h::aggregate(rows));
  std::cout << agg;
  if (!out_path.empty()) h::write_text_file(out_path, agg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent load-balancing experiments"};
  app.require_subcommand(1);

  ConfigArgs sim_args;
  std::string sim_seeds = "1";
  auto* sim = app.add_subcommand("simulate", "Run baseline dispatch episodes");
  sim_args.attach(sim);
  sim->add_option("--seeds", sim_seeds, "Seed or inclusive range A..B");

  ConfigArgs train_args;
  std::uint64_t train_seed = 1;
  auto* train = app.add_subcommand("train", "Train the learned dispatchers");
  train_args.attach(train, false);
  train->add_option("--seed", train_seed, "Training seed");
  std::string train_episodes;
  train->add_option("--episodes", train_episodes, "Override training episodes");

  ConfigArgs eval_args;
  std::string eval_seeds = "1";
  std::string eval_ckpt;
  bool eval_stochastic = false;
  auto* eval = app.add_subcommand("evaluate", "Run trained dispatch episodes");
  eval_args.attach(eval, false);
  eval->add_option("--seeds", eval_seeds, "Seed or inclusive range A..B");
  eval->add_option("--checkpoints", eval_ckpt, "Checkpoint directory");
  eval->add_flag("--stochastic", eval_stochastic, "Sample actions instead of the mean");

  std::string an_policy = "sed", an_scenario = "ideal", an_out;
  int an_qcap = 30;
  bool an_sweep = false;
  auto* an = app.add_subcommand("analytic", "Two-server chain stationary metrics");
  an->add_option("--policy", an_policy, "ecmp, wcmp, lsq or sed");
  an->add_option("--scenario", an_scenario, "ideal, obs50, obs33 or misweighted");
  an->add_option("--qmax", an_qcap, "Queue truncation cap");
  an->add_flag("--sweep", an_sweep, "All policies and scenarios");
  an->add_option("--out", an_out, "Also write the CSV here");

  ConfigArgs sweep_args;
  std::string sweep_seeds = "1", sweep_key;
  std::vector<std::string> sweep_values;
  auto* sw = app.add_subcommand("sweep", "Vary one config key over values");
  sweep_args.attach(sw);
  sw->add_option("--seeds", sweep_seeds, "Seed or inclusive range A..B");
  sw->add_option("--key", sweep_key, "Dotted config key to vary");
  sw->add_option("--values", sweep_values, "Values for the key")
      ->delimiter(',');

  std::string rep_in = "out/metrics.csv", rep_out;
  auto* rep = app.add_subcommand("report", "Re-aggregate a metrics CSV");
  rep->add_option("--in", rep_in, "Metrics CSV path");
  rep->add_option("--out", rep_out, "Also write the aggregate here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::ostringstream msg;
    msg << e.get_name() << ": " << e.what();
    return fail_json("config", msg.str(), 2);
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_args, sim_seeds);
    if (train->parsed()) {
      if (!train_episodes.empty())
        train_args.sets.push_back("rl.episodes=" + train_episodes);
      return cmd_train(train_args, train_seed);
    }
    if (eval->parsed())
      return cmd_evaluate(eval_args, eval_seeds, eval_ckpt, eval_stochastic);
    if (an->parsed())
      return cmd_analytic(an_policy, an_scenario, an_qcap, an_sweep, an_out);
    if (sw->parsed())
      return cmd_sweep(sweep_args, sweep_seeds, sweep_key, sweep_values);
    if (rep->parsed()) return cmd_report(rep_in, rep_out);
  } catch (const ConfigError& e) {
    return fail_json("config", e.what(), 2);
  } catch (const std::exception& e) {
    return fail_json("runtime", e.what(), 3);
  }
  return 0;
}
