#include "boreal/boreal_c.h"

#include <cstring>
#include <string>

#include "boreal/config.hpp"
#include "boreal/errors.hpp"
#include "boreal/rollout.hpp"

struct boreal_env {
  boreal::EpisodeConfig base;
  boreal::ForestEnv env;
  boreal::AnnualMetrics last;
  std::string error;
};

namespace {

void copy_message(const std::string& msg, char* err, std::size_t err_len) {
  if (!err || err_len == 0) return;
  const std::size_t n = std::min(msg.size(), err_len - 1);
  std::memcpy(err, msg.data(), n);
  err[n] = '\0';
}

template <class F>
int guarded(boreal_env* env, F&& body) {
  try {
    body();
    return BOREAL_OK;
  } catch (const boreal::ConfigError& e) {
    env->error = e.what();
    return BOREAL_ERR_CONFIG;
  } catch (const boreal::PhysicsFault& e) {
    env->error = e.what();
    return BOREAL_ERR_PHYSICS;
  } catch (const std::exception& e) {
    env->error = e.what();
    return BOREAL_ERR_CONTRACT;
  }
}

const std::vector<std::string>& info_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, _] : boreal::annual_metrics_fields(boreal::AnnualMetrics{}))
      out.emplace_back(name);
    return out;
  }();
  return names;
}

}  // namespace

extern "C" {

const char* boreal_version(void) { return BOREAL_VERSION; }

boreal_env* boreal_env_create(const char* mode, const char* overrides, char* err, std::size_t err_len) {
  try {
    boreal::RunConfig cfg;
    boreal::set_config_value(cfg, "env.mode", mode ? mode : "");
    if (overrides) boreal::apply_config_text(cfg, overrides);
    boreal::validate_run_config(cfg);
    auto* env = new boreal_env;
    env->base = cfg.env;
    return env;
  } catch (const std::exception& e) {
    copy_message(e.what(), err, err_len);
    return nullptr;
  }
}

void boreal_env_destroy(boreal_env* env) { delete env; }

std::size_t boreal_env_observation_size(const boreal_env* env) {
  return env->base.mode == boreal::EnvMode::kGeneralist ? boreal::kGeneralistObservationSize
                                                        : boreal::kBaseObservationSize;
}

int boreal_action_count(void) { return boreal::kActionCount; }

int boreal_env_reset(boreal_env* env, std::uint64_t seed, std::uint64_t episode, double preference,
                     double* observation, std::size_t observation_len) {
  return guarded(env, [&] {
    if (observation_len < boreal_env_observation_size(env))
      throw boreal::ContractViolation("observation buffer too small");
    boreal::RolloutSpec spec;
    spec.seed = seed;
    spec.episode = episode;
    spec.preference = preference;
    const auto obs = env->env.reset(boreal::rollout_episode_config(env->base, spec));
    std::copy(obs.begin(), obs.end(), observation);
    env->last = {};
  });
}

int boreal_env_step(boreal_env* env, int action, double* observation, std::size_t observation_len,
                    double* reward, int* terminated, int* truncated) {
  return guarded(env, [&] {
    if (observation_len < boreal_env_observation_size(env))
      throw boreal::ContractViolation("observation buffer too small");
    boreal::require(action >= 0 && action < boreal::kActionCount, "action index out of range");
    const boreal::StepResult r = env->env.step(action);
    std::copy(r.observation.begin(), r.observation.end(), observation);
    reward[0] = r.reward.r_carbon;
    reward[1] = r.reward.r_thaw;
    *terminated = r.terminated ? 1 : 0;
    *truncated = r.truncated ? 1 : 0;
    env->last = r.info;
  });
}

int boreal_env_action_mask(const boreal_env* env, int* mask, std::size_t mask_len) {
  auto* self = const_cast<boreal_env*>(env);
  return guarded(self, [&] {
    if (mask_len < static_cast<std::size_t>(boreal::kActionCount))
      throw boreal::ContractViolation("mask buffer too small");
    const auto flags = env->env.action_mask().as_array();
    for (std::size_t i = 0; i < flags.size(); ++i) mask[i] = flags[i] ? 1 : 0;
  });
}

std::size_t boreal_info_count(void) { return info_names().size(); }

const char* boreal_info_name(std::size_t index) {
  return index < info_names().size() ? info_names()[index].c_str() : nullptr;
}

int boreal_env_info(const boreal_env* env, double* values, std::size_t values_len) {
  auto* self = const_cast<boreal_env*>(env);
  return guarded(self, [&] {
    const auto fields = boreal::annual_metrics_fields(env->last);
    if (values_len < fields.size()) throw boreal::ContractViolation("info buffer too small");
    for (std::size_t i = 0; i < fields.size(); ++i) values[i] = fields[i].second;
  });
}

const char* boreal_env_last_error(const boreal_env* env) { return env->error.c_str(); }

}  // extern "C"
