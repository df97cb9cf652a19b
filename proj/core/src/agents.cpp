#include "boreal/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "boreal/errors.hpp"

namespace boreal {

ForestTask::ForestTask(EpisodeConfig base, std::uint64_t base_seed, std::uint64_t site_seed)
    : base_(std::move(base)), base_seed_(base_seed), site_seed_(site_seed) {}

std::size_t ForestTask::observation_size() const {
  return base_.mode == EnvMode::kGeneralist ? kGeneralistObservationSize : kBaseObservationSize;
}

EpisodeConfig ForestTask::episode_config(std::uint64_t episode_index, double preference) const {
  EpisodeConfig cfg = base_;
  cfg.seeds = episode_seeds(base_.mode, base_seed_, site_seed_, episode_index);
  cfg.preference_mode = PreferenceMode::kFixed;
  cfg.preference = preference;
  return cfg;
}

std::vector<double> ForestTask::reset(std::uint64_t episode_index, double preference) {
  return env_.reset(episode_config(episode_index, preference));
}

TaskStep ForestTask::step(int action) {
  StepResult r = env_.step(action);
  last_ = r.info;
  TaskStep t;
  t.observation = std::move(r.observation);
  t.reward = r.reward;
  t.done = r.terminated || r.truncated;
  t.density = r.info.density;
  t.conifer_fraction = r.info.conifer_fraction;
  return t;
}

std::pair<std::size_t, std::size_t> ForestTask::site_context() const {
  if (base_.mode == EnvMode::kGeneralist) return {kBaseObservationSize, kGeneralistObservationSize};
  return {kBaseObservationSize, kBaseObservationSize};
}

std::unique_ptr<MoTask> ForestTask::clone() const {
  return std::make_unique<ForestTask>(base_, base_seed_, site_seed_);
}

double episode_preference(PreferenceMode mode, double fixed, std::uint64_t seed,
                          std::uint64_t episode_index) {
  if (mode == PreferenceMode::kFixed) return fixed;
  RngStream rng(derive_seed(derive_seed(seed, static_cast<std::uint64_t>(StreamId::kPreference)),
                            episode_index));
  return preference_grid_value(rng.below(kPreferenceGridSize));
}

ConstantPolicy::ConstantPolicy(int action, std::string id) : action_(action), id_(std::move(id)) {
  require(action >= 0 && action < kActionCount, "ConstantPolicy: action out of range");
  if (id_.empty()) id_ = "constant_" + std::to_string(action);
}

namespace {

int argmax_lowest(const double* v, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (v[i] > v[best]) best = i;
  return static_cast<int>(best);
}

class GreedyEupgPolicy : public Policy {
 public:
  GreedyEupgPolicy(Mlp net, std::string id) : net_(std::move(net)), id_(std::move(id)) {}
  int act(const std::vector<double>& obs, const std::array<double, 2>& accrued, const ActionMask&,
          int horizon) override {
    net_.forward(eupg_input(obs, accrued, horizon), cache_);
    const auto& logits = cache_.heads[0];
    return argmax_lowest(logits.data(), logits.size());
  }
  std::unique_ptr<Policy> clone() const override {
    return std::make_unique<GreedyEupgPolicy>(net_, id_);
  }
  std::string id() const override { return id_; }

 private:
  Mlp net_;
  ForwardCache cache_;
  std::string id_;
};

class GreedyPpoPolicy : public Policy {
 public:
  GreedyPpoPolicy(Mlp net, std::string id) : net_(std::move(net)), id_(std::move(id)) {}
  int act(const std::vector<double>& obs, const std::array<double, 2>&, const ActionMask& mask,
          int) override {
    net_.forward(obs, cache_);
    const auto lp = policy_log_probs(net_, cache_, mask);
    return argmax_lowest(lp.data(), lp.size());
  }
  std::unique_ptr<Policy> clone() const override {
    return std::make_unique<GreedyPpoPolicy>(net_, id_);
  }
  std::string id() const override { return id_; }

 private:
  Mlp net_;
  ForwardCache cache_;
  std::string id_;
};

}  // namespace

std::unique_ptr<Policy> make_greedy_policy(const Checkpoint& c) {
  if (c.algorithm == "eupg_fixed" || c.algorithm == "eupg_variable")
    return std::make_unique<GreedyEupgPolicy>(c.network("policy"), c.algorithm);
  if (c.algorithm == "ppo_gated" || c.algorithm == "curriculum_ppo")
    return std::make_unique<GreedyPpoPolicy>(c.network("policy"), c.algorithm);
  throw FormatError("checkpoint algorithm '" + c.algorithm + "' is unknown");
}

double LambdaEvaluation::mean_carbon() const {
  double s = 0.0;
  for (const auto& e : episodes) s += e.carbon_return;
  return episodes.empty() ? 0.0 : s / static_cast<double>(episodes.size());
}

double LambdaEvaluation::mean_thaw() const {
  double s = 0.0;
  for (const auto& e : episodes) s += e.thaw_return;
  return episodes.empty() ? 0.0 : s / static_cast<double>(episodes.size());
}

double LambdaEvaluation::mean_scalarized() const {
  double s = 0.0;
  for (const auto& e : episodes) s += e.scalarized_return;
  return episodes.empty() ? 0.0 : s / static_cast<double>(episodes.size());
}

namespace {

EpisodeEvaluation run_greedy_episode(Policy& policy, MoTask& task, double lambda,
                                     std::uint64_t index) {
  EpisodeEvaluation e;
  std::vector<double> obs = task.reset(index, lambda);
  std::array<double, 2> accrued{0.0, 0.0};
  for (;;) {
    const int a = policy.act(obs, accrued, task.action_mask(), task.horizon());
    TaskStep s = task.step(a);
    accrued[0] += s.reward.r_carbon;
    accrued[1] += s.reward.r_thaw;
    e.trajectory.push_back({a, s.reward, s.density, s.conifer_fraction});
    obs = std::move(s.observation);
    if (s.done) break;
  }
  e.carbon_return = accrued[0];
  e.thaw_return = accrued[1];
  e.scalarized_return = lambda * accrued[0] + (1.0 - lambda) * accrued[1];
  e.final_density = e.trajectory.back().density;
  e.final_conifer = e.trajectory.back().conifer_fraction;
  return e;
}

}  // namespace

EvaluationRecord evaluate_policy(const Policy& policy, const MoTask& task,
                                 const std::vector<double>& lambdas, std::size_t episodes_per_lambda,
                                 std::uint64_t first_episode, std::size_t workers) {
  require(!lambdas.empty(), "evaluate_policy: empty lambda grid");
  require(episodes_per_lambda > 0, "evaluate_policy: need at least one episode");
  EvaluationRecord rec;
  rec.policy_id = policy.id();
  rec.results.resize(lambdas.size());
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    rec.results[l].preference = lambdas[l];
    rec.results[l].episodes.resize(episodes_per_lambda);
  }
  const std::size_t jobs = lambdas.size() * episodes_per_lambda;
  auto run_range = [&](std::size_t worker, std::size_t stride) {
    auto local_policy = policy.clone();
    auto local_task = task.clone();
    for (std::size_t j = worker; j < jobs; j += stride) {
      const std::size_t l = j / episodes_per_lambda;
      const std::size_t e = j % episodes_per_lambda;
      rec.results[l].episodes[e] =
          run_greedy_episode(*local_policy, *local_task, lambdas[l], first_episode + e);
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, jobs));
  if (workers == 1) {
    run_range(0, 1);
  } else {
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w)
      threads.emplace_back([&, w] {
        try {
          run_range(w, workers);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& t : threads) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return rec;
}

}  // namespace boreal
