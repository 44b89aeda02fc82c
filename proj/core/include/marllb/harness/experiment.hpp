#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "marllb/rl/trainer.hpp"
#include "marllb/sim/engine.hpp"

namespace marllb::harness {

// Anything wrong with the experiment description itself: schema violations,
// unknown keys, bad values, missing referenced artifacts. The CLI maps this
// to its config-error exit status.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string name = "custom";
  sim::EpisodeConfig episode;
  std::string policy = "sed";
  rl::LearnerConfig learner;  // dims stay 0 until bound to the episode
  std::size_t train_episodes = 500;
  std::size_t updates_per_episode = 10;
  std::string output_dir = "out";
};

// The moderate-scale evaluation cluster: two agents, four 2-CPU and four
// 1-CPU unit-rate servers, 60 s episodes at half-second decisions. The
// arrival rate keeps CPU utilization at 0.845 for every profile, so the
// profile name picks both the work mix and the rate.
ExperimentConfig twotier_preset(const std::string& profile);

// Strict parse: every key is checked against the schema, unknown keys are
// ConfigErrors. An optional "preset" key seeds the config before overrides.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

// Resolved canonical serialization; equal configs serialize identically.
std::string canonical_text(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);

// Rewrites one dotted-path key in raw config text, e.g. ("traffic.rate",
// "15.0"). The value literal is parsed as JSON, bare words as strings.
std::string override_key(const std::string& json_text, const std::string& key,
                         const std::string& value_literal);

rl::TrainerConfig trainer_config(const ExperimentConfig& cfg,
                                 std::uint64_t seed);

}  // namespace marllb::harness
