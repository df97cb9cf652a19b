#include "boreal/rollout.hpp"

#include <ostream>

#include "boreal/errors.hpp"
#include "json.hpp"

namespace boreal {

EpisodeConfig rollout_episode_config(const EpisodeConfig& base, const RolloutSpec& spec) {
  EpisodeConfig cfg = base;
  cfg.seeds = episode_seeds(base.mode, spec.seed, spec.seed, spec.episode);
  cfg.preference_mode = PreferenceMode::kFixed;
  cfg.preference = spec.preference;
  return cfg;
}

void write_rollout_golden(std::ostream& out, const EpisodeConfig& base, const RolloutSpec& spec) {
  require(!spec.actions.empty(), "rollout: empty action script");
  ForestEnv env;
  const EpisodeConfig cfg = rollout_episode_config(base, spec);
  const std::vector<double> first = env.reset(cfg);
  nlohmann::ordered_json header{
      {"mode", base.mode == EnvMode::kGeneralist ? "generalist" : "site_specific"},
      {"seed", spec.seed},
      {"episode", spec.episode},
      {"preference", spec.preference},
      {"observation_size", env.observation_size()},
      {"action_count", kActionCount}};
  out << header.dump() << '\n';
  out << nlohmann::ordered_json{{"t", 0}, {"observation", first}}.dump() << '\n';
  for (int t = 0; !env.done() && (spec.steps <= 0 || t < spec.steps); ++t) {
    const int a = spec.actions[static_cast<std::size_t>(t) % spec.actions.size()];
    const StepResult r = env.step(a);
    nlohmann::ordered_json info = nlohmann::ordered_json::object();
    for (const auto& [name, v] : annual_metrics_fields(r.info)) info[std::string(name)] = v;
    nlohmann::ordered_json rec{{"t", t + 1},
                               {"action", a},
                               {"observation", r.observation},
                               {"reward", {r.reward.r_carbon, r.reward.r_thaw}},
                               {"terminated", r.terminated},
                               {"truncated", r.truncated},
                               {"info", info}};
    out << rec.dump() << '\n';
  }
}

}  // namespace boreal
