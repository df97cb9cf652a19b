#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "boreal/agents.hpp"
#include "boreal/env.hpp"

namespace boreal {

/// Everything a training or evaluation run depends on.
struct RunConfig {
  std::string algorithm = "ppo_gated";  // eupg_fixed | eupg_variable | ppo_gated | curriculum_ppo
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> site_seeds{0};  // one agent per site seed in site-specific mode
  std::uint64_t timesteps = 100000;
  std::uint64_t checkpoint_every = 100;  // episodes
  std::size_t workers = 1;

  EpisodeConfig env;
  EupgConfig eupg;
  PpoConfig ppo;
  CurriculumConfig curriculum;

  std::vector<double> eval_lambdas = preference_grid();
  std::size_t eval_episodes = 10;
  std::uint64_t eval_first_episode = 1000000;
};

/// A documented configuration key.
struct ConfigKey {
  std::string key;
  std::string description;
};

/// Every recognized key in rendering order; site parameters appear as "param.<name>".
const std::vector<ConfigKey>& config_keys();

/// Sets one key. Unknown keys and malformed values throw ConfigError naming the key.
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);

/// Current value of a key as text; parameter pins that are unset render as "".
std::string get_config_value(const RunConfig& cfg, std::string_view key);

/// Applies "key = value" lines; '#' starts a comment. Duplicate keys are errors.
void apply_config_text(RunConfig& cfg, std::string_view text);

RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Fully resolved config as "key = value" lines; parses back to the same config.
std::string render_run_config(const RunConfig& cfg);

/// Cross-field checks; throws ConfigError.
void validate_run_config(const RunConfig& cfg);

}  // namespace boreal
