#include <cmath>

#include "boreal/agents.hpp"
#include "boreal/errors.hpp"

namespace boreal {

namespace {

int sample_categorical(const std::vector<double>& p, RngStream& rng) {
  const double u = rng.uniform();
  double c = 0.0;
  int last_valid = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    c += p[i];
    last_valid = static_cast<int>(i);
    if (u < c) return static_cast<int>(i);
  }
  return last_valid;
}

MlpSpec eupg_spec(std::size_t input_dim, const std::vector<std::size_t>& hidden) {
  MlpSpec s;
  s.input_dim = input_dim;
  s.hidden = hidden;
  s.heads = {{"logits", static_cast<std::size_t>(kActionCount), 0.01}};
  return s;
}

}  // namespace

std::vector<double> eupg_input(const std::vector<double>& observation,
                               const std::array<double, 2>& accrued, int horizon) {
  std::vector<double> in(observation);
  const double scale = 1.0 / std::max(1, horizon);
  in.push_back(accrued[0] * scale);
  in.push_back(accrued[1] * scale);
  return in;
}

void eupg_episode_gradient(const Mlp& policy, const EupgEpisode& ep, double gamma,
                           std::vector<double>& gradient) {
  const std::size_t n = ep.actions.size();
  require(ep.inputs.size() == n && ep.rewards.size() == n, "eupg_episode_gradient: ragged episode");
  if (n == 0) return;
  std::vector<double> returns(n);
  double g = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    g = ep.rewards[t].scalarize(ep.preference) + gamma * g;
    returns[t] = g;
  }
  double baseline = 0.0;
  for (double r : returns) baseline += r;
  baseline /= static_cast<double>(n);

  ForwardCache cache;
  std::vector<std::vector<double>> head_grad(1);
  for (std::size_t t = 0; t < n; ++t) {
    const double advantage = returns[t] - baseline;
    if (advantage == 0.0) continue;
    policy.forward(ep.inputs[t], cache);
    const std::vector<double> p = masked_softmax(cache.heads[0]);
    // d/dlogits of -(A/n) log pi(a) = -(A/n) (onehot(a) - p)
    head_grad[0].assign(p.size(), 0.0);
    const double w = -advantage / static_cast<double>(n);
    for (std::size_t i = 0; i < p.size(); ++i)
      head_grad[0][i] = w * ((static_cast<int>(i) == ep.actions[t] ? 1.0 : 0.0) - p[i]);
    policy.backward(cache, head_grad, gradient);
  }
}

TrainResult train_eupg(MoTask& task, const EupgConfig& cfg, const TrainCallbacks& cb) {
  require(cfg.gamma >= 0.0 && cfg.gamma <= 1.0, "train_eupg: gamma outside [0, 1]");
  const std::string algorithm =
      cfg.preference_mode == PreferenceMode::kFixed ? "eupg_fixed" : "eupg_variable";
  Mlp policy(eupg_spec(task.observation_size() + 2, cfg.hidden));
  RngStream init_rng(derive_seed(cfg.seed, 101));
  policy.initialize(init_rng);
  RngStream action_rng = RngStream::split(cfg.seed, StreamId::kPolicy);
  GradientTape tape = policy.make_tape();

  TrainResult result;
  auto snapshot = [&] {
    Checkpoint c;
    c.algorithm = algorithm;
    c.networks = {{"policy", policy}};
    c.seeds = {{"seed", cfg.seed}};
    c.metadata = {{"horizon", std::to_string(task.horizon())},
                  {"observation_size", std::to_string(task.observation_size())}};
    return c;
  };

  ForwardCache cache;
  std::uint64_t episode = 0;
  while (result.total_steps < cfg.total_steps) {
    EupgEpisode ep;
    ep.preference = episode_preference(cfg.preference_mode, cfg.fixed_preference, cfg.seed, episode);
    std::vector<double> obs = task.reset(episode, ep.preference);
    std::array<double, 2> accrued{0.0, 0.0};
    double discount = 1.0;
    EpisodeLog log;
    log.episode = episode;
    log.preference = ep.preference;
    for (;;) {
      std::vector<double> in = eupg_input(obs, accrued, task.horizon());
      policy.forward(in, cache);
      const int a = sample_categorical(masked_softmax(cache.heads[0]), action_rng);
      TaskStep s = task.step(a);
      ep.inputs.push_back(std::move(in));
      ep.actions.push_back(a);
      ep.rewards.push_back(s.reward);
      ep.accrued.push_back(accrued);
      accrued[0] += discount * s.reward.r_carbon;
      accrued[1] += discount * s.reward.r_thaw;
      discount *= cfg.gamma;
      log.carbon_return += s.reward.r_carbon;
      log.thaw_return += s.reward.r_thaw;
      log.final_density = s.density;
      log.final_conifer = s.conifer_fraction;
      if (cfg.keep_step_records) log.steps.push_back({a, s.reward, s.density, s.conifer_fraction});
      ++result.total_steps;
      obs = std::move(s.observation);
      if (s.done) break;
    }
    tape.zero_gradient();
    eupg_episode_gradient(policy, ep, cfg.gamma, tape.gradient);
    adam_step(policy, tape, cfg.learning_rate);

    log.scalarized_return = ep.preference * log.carbon_return + (1.0 - ep.preference) * log.thaw_return;
    log.total_steps = result.total_steps;
    if (cb.on_episode) cb.on_episode(log);
    if (!cfg.keep_step_records) log.steps.clear();
    result.curve.push_back(std::move(log));
    ++episode;
    if (cb.on_checkpoint && cb.checkpoint_every > 0 && episode % cb.checkpoint_every == 0)
      cb.on_checkpoint(snapshot(), episode);
  }
  result.episodes_seen = episode;
  result.checkpoint = snapshot();
  return result;
}

}  // namespace boreal
