#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "boreal/env.hpp"
#include "boreal/nnet.hpp"

namespace boreal {

/// What an agent sees after one decision.
struct TaskStep {
  std::vector<double> observation;
  RewardVector reward;
  bool done = false;
  double density = 0.0;          // stems/ha after the step
  double conifer_fraction = 0.0;
};

/// An episodic two-objective task addressed by episode index. Episode seeds
/// are a pure function of the index, so skipping an index never shifts any
/// other episode.
class MoTask {
 public:
  virtual ~MoTask() = default;
  virtual std::size_t observation_size() const = 0;
  virtual int horizon() const = 0;
  virtual std::vector<double> reset(std::uint64_t episode_index, double preference) = 0;
  virtual TaskStep step(int action) = 0;
  virtual ActionMask action_mask() const = 0;
  /// [begin, end) of the observation describing the site.
  virtual std::pair<std::size_t, std::size_t> site_context() const = 0;
  virtual std::unique_ptr<MoTask> clone() const = 0;
};

/// The forest environment as an MoTask.
class ForestTask : public MoTask {
 public:
  /// `base` supplies mode, constants and simulator settings; seeds and the
  /// preference are filled per episode from `base_seed` and `site_seed`.
  ForestTask(EpisodeConfig base, std::uint64_t base_seed, std::uint64_t site_seed);

  std::size_t observation_size() const override;
  int horizon() const override { return base_.constants.horizon; }
  std::vector<double> reset(std::uint64_t episode_index, double preference) override;
  TaskStep step(int action) override;
  ActionMask action_mask() const override { return env_.action_mask(); }
  std::pair<std::size_t, std::size_t> site_context() const override;
  std::unique_ptr<MoTask> clone() const override;

  const ForestEnv& env() const { return env_; }
  const AnnualMetrics& last_metrics() const { return last_; }
  EpisodeConfig episode_config(std::uint64_t episode_index, double preference) const;

 private:
  EpisodeConfig base_;
  std::uint64_t base_seed_;
  std::uint64_t site_seed_;
  ForestEnv env_;
  AnnualMetrics last_;
};

/// Carbon weight for an episode: the fixed value, or a grid draw keyed by index.
double episode_preference(PreferenceMode mode, double fixed, std::uint64_t seed,
                          std::uint64_t episode_index);

struct StepRecord {
  int action = 0;
  RewardVector reward;
  double density = 0.0;
  double conifer_fraction = 0.0;
};

/// One row of the learning curve.
struct EpisodeLog {
  std::uint64_t episode = 0;        // episode index (seed key)
  std::uint64_t total_steps = 0;    // agent steps after this episode
  double preference = 0.0;
  double scalarized_return = 0.0;
  double carbon_return = 0.0;
  double thaw_return = 0.0;
  double final_density = 0.0;
  double final_conifer = 0.0;
  double acceptance_rate = 1.0;
  double threshold = 0.0;
  double selection_score = 1.0;
  std::vector<StepRecord> steps;
};

struct TrainCallbacks {
  std::function<void(const EpisodeLog&)> on_episode;
  /// Called every `checkpoint_every` episodes with the current networks.
  std::function<void(const Checkpoint&, std::uint64_t episode)> on_checkpoint;
  std::uint64_t checkpoint_every = 0;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<EpisodeLog> curve;  // accepted episodes in order
  std::uint64_t total_steps = 0;
  std::uint64_t episodes_seen = 0;   // includes skipped ones
};

// ---- EUPG ----

struct EupgConfig {
  PreferenceMode preference_mode = PreferenceMode::kFixed;
  double fixed_preference = 1.0;
  double learning_rate = 1e-3;
  double gamma = 1.0;
  std::vector<std::size_t> hidden{128, 64};
  std::uint64_t total_steps = 100000;
  std::uint64_t seed = 0;
  bool keep_step_records = true;
};

/// One episode as EUPG sees it: network inputs (observation + scaled accrued
/// returns), actions and reward vectors.
struct EupgEpisode {
  std::vector<std::vector<double>> inputs;
  std::vector<int> actions;
  std::vector<RewardVector> rewards;
  std::vector<std::array<double, 2>> accrued;  // sum_{k<t} gamma^k R_k
  double preference = 0.0;
};

/// Policy input: observation followed by the accrued return divided by the horizon.
std::vector<double> eupg_input(const std::vector<double>& observation,
                               const std::array<double, 2>& accrued, int horizon);

/// Accumulates the REINFORCE gradient (of the loss to minimize) for one
/// episode of scalarized returns with a mean-return baseline.
void eupg_episode_gradient(const Mlp& policy, const EupgEpisode& episode, double gamma,
                           std::vector<double>& gradient);

TrainResult train_eupg(MoTask& task, const EupgConfig& cfg, const TrainCallbacks& cb = {});

// ---- PPO ----

struct PpoConfig {
  PreferenceMode preference_mode = PreferenceMode::kSampled;
  double fixed_preference = 0.5;
  double learning_rate = 3e-4;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip = 0.2;
  std::size_t rollout_steps = 2048;
  std::size_t minibatch = 64;
  std::size_t epochs = 10;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double max_grad_norm = 0.5;
  double adam_epsilon = 1e-5;
  std::vector<std::size_t> hidden{64, 64};
  bool gated = true;
  std::uint64_t total_steps = 100000;
  std::uint64_t seed = 0;
  bool keep_step_records = true;
};

struct CurriculumConfig {
  double initial_threshold = 0.5;
  double band_low = 0.3;
  double band_high = 0.7;
  std::size_t window = 50;
  double threshold_step = 0.01;
  std::size_t warmup_episodes = 20;
  std::vector<std::size_t> hidden{64, 64};
  double learning_rate = 1e-3;
  std::size_t updates_per_episode = 8;
  std::size_t buffer_size = 256;
  /// When set, the selector is bypassed and every episode scores this value.
  std::optional<double> frozen_score;
};

/// Gated policy heads: non-planting (indices 0-14), planting (15-24), gate.
MlpSpec ppo_policy_spec(std::size_t input_dim, const std::vector<std::size_t>& hidden, bool gated);
MlpSpec ppo_value_spec(std::size_t input_dim, const std::vector<std::size_t>& hidden);

/// Action log-probabilities for all 25 actions (masked ones are -infinity).
/// Gated: log sigma(gate) + log softmax(plant) and log(1 - sigma(gate)) +
/// log softmax(non-plant), renormalized over the valid set. Ungated: softmax
/// of the single 25-logit head with no mask.
std::array<double, kActionCount> policy_log_probs(const Mlp& policy, const ForwardCache& cache,
                                                  const ActionMask& mask);

/// dLoss/dHeads from dLoss/dLogProb(a) for all a (the full masked distribution).
std::vector<std::vector<double>> policy_head_gradients(
    const Mlp& policy, const ForwardCache& cache, const ActionMask& mask,
    const std::array<double, kActionCount>& d_log_probs_flat);

/// Generalized advantage estimates; `dones[t]` marks a terminal after step t.
std::vector<double> compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                                const std::vector<bool>& dones, double last_value, double gamma,
                                double lambda);

TrainResult train_ppo_gated(MoTask& task, const PpoConfig& cfg, const TrainCallbacks& cb = {});

struct CurriculumStats {
  std::uint64_t decisions = 0;
  std::uint64_t accepted = 0;
  std::uint64_t deadlock_resets = 0;
  double threshold = 0.5;
};

TrainResult train_curriculum_ppo(MoTask& task, const PpoConfig& cfg, const CurriculumConfig& cur,
                                 const TrainCallbacks& cb = {}, CurriculumStats* stats = nullptr,
                                 std::vector<std::pair<std::uint64_t, bool>>* decisions = nullptr);

// ---- Policies and evaluation ----

class Policy {
 public:
  virtual ~Policy() = default;
  virtual int act(const std::vector<double>& observation, const std::array<double, 2>& accrued,
                  const ActionMask& mask, int horizon) = 0;
  virtual std::unique_ptr<Policy> clone() const = 0;
  virtual std::string id() const = 0;
};

class ConstantPolicy : public Policy {
 public:
  explicit ConstantPolicy(int action, std::string id = {});
  int act(const std::vector<double>&, const std::array<double, 2>&, const ActionMask&, int) override {
    return action_;
  }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<ConstantPolicy>(*this); }
  std::string id() const override { return id_; }

 private:
  int action_;
  std::string id_;
};

/// Greedy (argmax, lowest index on ties) policy restored from a checkpoint.
std::unique_ptr<Policy> make_greedy_policy(const Checkpoint& c);

struct EpisodeEvaluation {
  double carbon_return = 0.0;
  double thaw_return = 0.0;
  double scalarized_return = 0.0;
  double final_density = 0.0;
  double final_conifer = 0.0;
  std::vector<StepRecord> trajectory;
};

struct LambdaEvaluation {
  double preference = 0.0;
  std::vector<EpisodeEvaluation> episodes;
  double mean_carbon() const;
  double mean_thaw() const;
  double mean_scalarized() const;
};

struct EvaluationRecord {
  std::string policy_id;
  std::vector<LambdaEvaluation> results;  // one per lambda, grid order
};

/// Greedy rollouts for each lambda; episode e uses index `first_episode + e`
/// for every lambda and every policy (common random numbers). `workers` > 1
/// runs (lambda, episode) pairs on threads; results do not depend on it.
EvaluationRecord evaluate_policy(const Policy& policy, const MoTask& task,
                                 const std::vector<double>& lambdas, std::size_t episodes_per_lambda,
                                 std::uint64_t first_episode = 0, std::size_t workers = 1);

}  // namespace boreal
