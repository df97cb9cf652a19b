#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "boreal/env.hpp"

namespace boreal {

/// A scripted episode used to compare front ends against the native environment.
struct RolloutSpec {
  std::uint64_t seed = 0;          // base and site seed
  std::uint64_t episode = 0;       // episode index
  double preference = 0.5;
  std::vector<int> actions{kNoOpAction};  // cycled
  int steps = 0;                   // 0 = until the episode ends
};

/// Environment for a rollout: `base` with the seeds and preference of `spec`.
EpisodeConfig rollout_episode_config(const EpisodeConfig& base, const RolloutSpec& spec);

/// JSON lines: a header, the reset observation, then one record per step with
/// observation, reward [carbon, thaw], terminated, truncated and info.
void write_rollout_golden(std::ostream& out, const EpisodeConfig& base, const RolloutSpec& spec);

}  // namespace boreal
