#include "marllb/harness/experiment.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "marllb/common.hpp"

namespace marllb::harness {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
  if (!j.is_object()) fail(ctx + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) known = known || it.key() == k;
    if (!known) fail("unknown key \"" + it.key() + "\" in " + ctx);
  }
}

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double num(const json& v, const std::string& ctx) {
  if (!v.is_number()) fail(ctx + " must be a number");
  return v.get<double>();
}

long long integer(const json& v, const std::string& ctx) {
  if (!v.is_number_integer()) fail(ctx + " must be an integer");
  return v.get<long long>();
}

std::size_t size_field(const json& v, const std::string& ctx) {
  long long n = integer(v, ctx);
  if (n < 0) fail(ctx + " must be non-negative");
  return static_cast<std::size_t>(n);
}

bool boolean(const json& v, const std::string& ctx) {
  if (!v.is_boolean()) fail(ctx + " must be a boolean");
  return v.get<bool>();
}

std::string text(const json& v, const std::string& ctx) {
  if (!v.is_string()) fail(ctx + " must be a string");
  return v.get<std::string>();
}

double profile_fraction(const std::string& name) {
  if (name == "cpu100") return 1.0;
  if (name == "cpu75") return 0.75;
  if (name == "cpu50") return 0.5;
  return -1.0;
}

void parse_topology(const json& j, sim::EpisodeConfig& ep) {
  check_keys(j, {"agents", "servers"}, "topology");
  if (const json* v = find(j, "agents"))
    ep.n_agents = size_field(*v, "topology.agents");
  if (const json* v = find(j, "servers")) {
    if (!v->is_array()) fail("topology.servers must be an array");
    ep.servers.clear();
    std::size_t i = 0;
    for (const json& s : *v) {
      std::string ctx = "topology.servers[" + std::to_string(i++) + "]";
      check_keys(s, {"cpu_count", "cpu_cap", "rate", "io_capable"}, ctx);
      sim::ServerSpec spec;
      if (const json* f = find(s, "cpu_count"))
        spec.cpu_count = static_cast<int>(integer(*f, ctx + ".cpu_count"));
      spec.cpu_cap = spec.cpu_count;
      if (const json* f = find(s, "cpu_cap"))
        spec.cpu_cap = static_cast<int>(integer(*f, ctx + ".cpu_cap"));
      if (const json* f = find(s, "rate")) spec.rate = num(*f, ctx + ".rate");
      if (const json* f = find(s, "io_capable"))
        spec.io_capable = boolean(*f, ctx + ".io_capable");
      ep.servers.push_back(spec);
    }
  }
}

void parse_traffic(const json& j, sim::EpisodeConfig& ep) {
  check_keys(j, {"profile", "cpu_fraction", "rate", "mean_work"}, "traffic");
  double total = ep.profile.mean_work;
  std::string name = ep.profile.name;
  double fraction = ep.profile.cpu_fraction;
  double rate = ep.profile.rate;
  if (const json* v = find(j, "profile")) {
    name = text(*v, "traffic.profile");
    double f = profile_fraction(name);
    if (f > 0.0) fraction = f;
    else if (name != "custom")
      fail("traffic.profile must be one of cpu100, cpu75, cpu50, custom");
  }
  if (const json* v = find(j, "cpu_fraction")) {
    fraction = num(*v, "traffic.cpu_fraction");
    if (!find(j, "profile")) name = "custom";
  }
  if (const json* v = find(j, "rate")) rate = num(*v, "traffic.rate");
  if (const json* v = find(j, "mean_work")) total = num(*v, "traffic.mean_work");
  if (!(fraction > 0.0) || fraction > 1.0)
    fail("traffic.cpu_fraction must be in (0, 1]");
  if (!(rate > 0.0)) fail("traffic.rate must be positive");
  if (!(total > 0.0)) fail("traffic.mean_work must be positive");
  ep.profile = sim::make_profile(name, fraction, rate, total);
}

void parse_episode(const json& j, sim::EpisodeConfig& ep) {
  check_keys(j,
             {"duration", "tick", "backlog_limit", "reject_timeout", "latency",
              "reservoir_duration", "reservoir_tct", "reservoir_arrival",
              "stats_decay", "obs_time_scale"},
             "episode");
  if (const json* v = find(j, "duration")) ep.duration = num(*v, "episode.duration");
  if (const json* v = find(j, "tick")) ep.tick = num(*v, "episode.tick");
  if (const json* v = find(j, "backlog_limit"))
    ep.backlog_limit = static_cast<int>(integer(*v, "episode.backlog_limit"));
  if (const json* v = find(j, "reject_timeout"))
    ep.reject_timeout = num(*v, "episode.reject_timeout");
  if (const json* v = find(j, "latency")) {
    check_keys(*v, {"lo", "hi"}, "episode.latency");
    if (const json* f = find(*v, "lo")) ep.latency.lo = num(*f, "episode.latency.lo");
    if (const json* f = find(*v, "hi")) ep.latency.hi = num(*f, "episode.latency.hi");
  }
  if (const json* v = find(j, "reservoir_duration"))
    ep.reservoir_duration = size_field(*v, "episode.reservoir_duration");
  if (const json* v = find(j, "reservoir_tct"))
    ep.reservoir_tct = size_field(*v, "episode.reservoir_tct");
  if (const json* v = find(j, "reservoir_arrival"))
    ep.reservoir_arrival = size_field(*v, "episode.reservoir_arrival");
  if (const json* v = find(j, "stats_decay"))
    ep.stats_decay = num(*v, "episode.stats_decay");
  if (const json* v = find(j, "obs_time_scale"))
    ep.obs_time_scale = num(*v, "episode.obs_time_scale");
}

void parse_rl(const json& j, ExperimentConfig& cfg) {
  check_keys(j,
             {"hidden", "lr", "gamma", "tau", "alpha_init", "target_entropy",
              "batch_size", "burn_in", "train_len", "replay", "single_critic",
              "action_floor", "episodes", "updates_per_episode"},
             "rl");
  rl::LearnerConfig& lc = cfg.learner;
  if (const json* v = find(j, "hidden")) lc.hidden = size_field(*v, "rl.hidden");
  if (const json* v = find(j, "lr")) lc.lr = num(*v, "rl.lr");
  if (const json* v = find(j, "gamma")) lc.gamma = num(*v, "rl.gamma");
  if (const json* v = find(j, "tau")) lc.tau = num(*v, "rl.tau");
  if (const json* v = find(j, "alpha_init")) lc.alpha_init = num(*v, "rl.alpha_init");
  if (const json* v = find(j, "target_entropy"))
    lc.target_entropy = num(*v, "rl.target_entropy");
  if (const json* v = find(j, "batch_size"))
    lc.batch_size = size_field(*v, "rl.batch_size");
  if (const json* v = find(j, "burn_in")) lc.burn_in = size_field(*v, "rl.burn_in");
  if (const json* v = find(j, "train_len"))
    lc.train_len = size_field(*v, "rl.train_len");
  if (const json* v = find(j, "replay"))
    lc.replay_capacity = size_field(*v, "rl.replay");
  if (const json* v = find(j, "single_critic"))
    lc.single_critic = boolean(*v, "rl.single_critic");
  if (const json* v = find(j, "action_floor"))
    lc.action_floor = num(*v, "rl.action_floor");
  if (const json* v = find(j, "episodes"))
    cfg.train_episodes = size_field(*v, "rl.episodes");
  if (const json* v = find(j, "updates_per_episode"))
    cfg.updates_per_episode = size_field(*v, "rl.updates_per_episode");
}

void parse_scenario(const json& j, sim::EpisodeConfig& ep) {
  check_keys(j, {"capacity_changes"}, "scenario");
  if (const json* v = find(j, "capacity_changes")) {
    if (!v->is_array()) fail("scenario.capacity_changes must be an array");
    ep.capacity_changes.clear();
    std::size_t i = 0;
    for (const json& c : *v) {
      std::string ctx = "scenario.capacity_changes[" + std::to_string(i++) + "]";
      check_keys(c, {"server", "time", "cpu_factor"}, ctx);
      sim::CapacityChange ch;
      if (const json* f = find(c, "server"))
        ch.server = static_cast<int>(integer(*f, ctx + ".server"));
      if (const json* f = find(c, "time")) ch.time = num(*f, ctx + ".time");
      if (const json* f = find(c, "cpu_factor"))
        ch.cpu_factor = num(*f, ctx + ".cpu_factor");
      ep.capacity_changes.push_back(ch);
    }
  }
}

ExperimentConfig parse_object(const json& j) {
  check_keys(j,
             {"name", "preset", "topology", "traffic", "episode", "reward",
              "policy", "rl", "scenario", "output"},
             "config");
  ExperimentConfig cfg;
  if (const json* v = find(j, "preset")) cfg = twotier_preset(text(*v, "preset"));
  if (const json* v = find(j, "name")) cfg.name = text(*v, "name");
  if (const json* v = find(j, "topology")) parse_topology(*v, cfg.episode);
  if (const json* v = find(j, "traffic")) parse_traffic(*v, cfg.episode);
  if (const json* v = find(j, "episode")) parse_episode(*v, cfg.episode);
  if (const json* v = find(j, "reward")) {
    std::string s = text(*v, "reward");
    try {
      cfg.episode.reward_kind = lb::reward_kind_from_string(s);
    } catch (const std::exception& e) {
      fail(std::string("reward: ") + e.what());
    }
  }
  if (const json* v = find(j, "policy")) cfg.policy = text(*v, "policy");
  if (const json* v = find(j, "rl")) parse_rl(*v, cfg);
  if (const json* v = find(j, "scenario")) parse_scenario(*v, cfg.episode);
  if (const json* v = find(j, "output")) {
    check_keys(*v, {"dir"}, "output");
    if (const json* f = find(*v, "dir")) cfg.output_dir = text(*f, "output.dir");
  }
  try {
    sim::validate(cfg.episode);
    rl::resolve_learner_config(cfg.learner, cfg.episode).validate();
  } catch (const std::exception& e) {
    fail(e.what());
  }
  return cfg;
}

json canonical_json(const ExperimentConfig& cfg) {
  json ep;
  ep["n_agents"] = cfg.episode.n_agents;
  json servers = json::array();
  for (const auto& s : cfg.episode.servers)
    servers.push_back({{"cpu_count", s.cpu_count},
                       {"cpu_cap", s.cpu_cap},
                       {"rate", s.rate},
                       {"io_capable", s.io_capable}});
  ep["servers"] = std::move(servers);
  json stages = json::array();
  for (const auto& st : cfg.episode.profile.stages)
    stages.push_back({{"queue", st.queue == sim::QueueKind::cpu ? "cpu" : "io"},
                      {"mean_work", st.mean_work}});
  ep["profile"] = {{"name", cfg.episode.profile.name},
                   {"rate", cfg.episode.profile.rate},
                   {"stages", std::move(stages)}};
  ep["duration"] = cfg.episode.duration;
  ep["tick"] = cfg.episode.tick;
  ep["backlog_limit"] = cfg.episode.backlog_limit;
  ep["reject_timeout"] = cfg.episode.reject_timeout;
  ep["latency"] = {{"lo", cfg.episode.latency.lo}, {"hi", cfg.episode.latency.hi}};
  json changes = json::array();
  for (const auto& c : cfg.episode.capacity_changes)
    changes.push_back({{"server", c.server},
                       {"time", c.time},
                       {"cpu_factor", c.cpu_factor}});
  ep["capacity_changes"] = std::move(changes);
  ep["reward"] = lb::to_string(cfg.episode.reward_kind);
  ep["reservoir_duration"] = cfg.episode.reservoir_duration;
  ep["reservoir_tct"] = cfg.episode.reservoir_tct;
  ep["reservoir_arrival"] = cfg.episode.reservoir_arrival;
  ep["stats_decay"] = cfg.episode.stats_decay;
  ep["obs_time_scale"] = cfg.episode.obs_time_scale;

  rl::LearnerConfig lc = rl::resolve_learner_config(cfg.learner, cfg.episode);
  json learner;
  learner["obs_dim"] = lc.obs_dim;
  learner["n_actions"] = lc.n_actions;
  learner["hidden"] = lc.hidden;
  learner["lr"] = lc.lr;
  learner["gamma"] = lc.gamma;
  learner["tau"] = lc.tau;
  learner["alpha_init"] = lc.alpha_init;
  learner["target_entropy"] = lc.target_entropy;  // NaN dumps as null
  learner["batch_size"] = lc.batch_size;
  learner["burn_in"] = lc.burn_in;
  learner["train_len"] = lc.train_len;
  learner["replay"] = lc.replay_capacity;
  learner["single_critic"] = lc.single_critic;
  learner["action_floor"] = lc.action_floor;

  json root;
  root["name"] = cfg.name;
  root["policy"] = cfg.policy;
  root["episode"] = std::move(ep);
  root["learner"] = std::move(learner);
  root["train_episodes"] = cfg.train_episodes;
  root["updates_per_episode"] = cfg.updates_per_episode;
  root["output_dir"] = cfg.output_dir;
  return root;
}

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

ExperimentConfig twotier_preset(const std::string& profile) {
  std::string p = profile;
  if (p.rfind("twotier-", 0) == 0) p = p.substr(8);
  double fraction = profile_fraction(p);
  if (fraction <= 0.0)
    fail("unknown preset profile \"" + profile +
         "\", expected cpu100, cpu75 or cpu50");
  ExperimentConfig cfg;
  cfg.name = "twotier-" + p;
  cfg.episode.n_agents = 2;
  cfg.episode.servers.clear();
  for (int i = 0; i < 4; ++i) cfg.episode.servers.push_back({2, 2, 1.0, true});
  for (int i = 0; i < 4; ++i) cfg.episode.servers.push_back({1, 1, 1.0, true});
  // Total CPU capacity is 12 work-seconds per second; hold utilization at
  // 0.845 regardless of how much of each task is CPU work.
  double rate = 0.845 * 12.0 / fraction;
  cfg.episode.profile = sim::make_profile(p, fraction, rate, 1.0);
  cfg.episode.duration = 60.0;
  cfg.episode.tick = 0.5;
  cfg.episode.reward_kind = lb::RewardKind::vbf;
  cfg.policy = "sed";
  return cfg;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  return parse_object(j);
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string canonical_text(const ExperimentConfig& cfg) {
  return canonical_json(cfg).dump();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  return fnv1a64(canonical_text(cfg));
}

std::string override_key(const std::string& json_text, const std::string& key,
                         const std::string& value_literal) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  json value;
  try {
    value = json::parse(value_literal);
  } catch (const std::exception&) {
    value = value_literal;  // bare word, keep it as a string
  }
  if (key.empty()) fail("empty override key");
  std::vector<std::string> parts;
  std::string cur;
  for (char c : key) {
    if (c == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  json* node = &j;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    const std::string& p = parts[i];
    if (p.empty()) fail("empty component in override key \"" + key + "\"");
    if (node->is_array()) {
      if (!all_digits(p)) fail("array index expected in \"" + key + "\"");
      std::size_t idx = std::stoul(p);
      if (idx >= node->size()) fail("index out of range in \"" + key + "\"");
      node = &(*node)[idx];
    } else {
      node = &(*node)[p];
    }
  }
  const std::string& last = parts.back();
  if (last.empty()) fail("empty component in override key \"" + key + "\"");
  if (node->is_array()) {
    if (!all_digits(last)) fail("array index expected in \"" + key + "\"");
    std::size_t idx = std::stoul(last);
    if (idx >= node->size()) fail("index out of range in \"" + key + "\"");
    (*node)[idx] = std::move(value);
  } else {
    (*node)[last] = std::move(value);
  }
  return j.dump();
}

rl::TrainerConfig trainer_config(const ExperimentConfig& cfg,
                                 std::uint64_t seed) {
  rl::TrainerConfig tc;
  tc.episode = cfg.episode;
  tc.learner = cfg.learner;
  tc.episodes = cfg.train_episodes;
  tc.updates_per_episode = cfg.updates_per_episode;
  tc.seed = seed;
  return tc;
}

}  // namespace marllb::harness
