#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "boreal/agents.hpp"
#include "boreal/errors.hpp"

namespace boreal {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kNonPlantCount = 15;
constexpr std::size_t kPlantCount = 10;

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double log_sum_exp(const double* v, std::size_t n) {
  double top = kNegInf;
  for (std::size_t i = 0; i < n; ++i) top = std::max(top, v[i]);
  if (top == kNegInf) return kNegInf;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(v[i] - top);
  return top + std::log(s);
}

bool is_gated(const Mlp& policy) { return policy.spec().heads.size() == 3; }

/// Unnormalized (pre-mask) log-probabilities of the hierarchical policy.
std::array<double, kActionCount> hierarchical_log_probs(const ForwardCache& cache) {
  const auto& np = cache.heads[0];
  const auto& pl = cache.heads[1];
  const double gate = cache.heads[2][0];
  const double log_plant = -softplus(-gate);
  const double log_nonplant = -softplus(gate);
  const double lse_np = log_sum_exp(np.data(), np.size());
  const double lse_pl = log_sum_exp(pl.data(), pl.size());
  std::array<double, kActionCount> l{};
  for (std::size_t i = 0; i < kNonPlantCount; ++i) l[i] = log_nonplant + np[i] - lse_np;
  for (std::size_t i = 0; i < kPlantCount; ++i) l[kNonPlantCount + i] = log_plant + pl[i] - lse_pl;
  return l;
}

int sample_from_log_probs(const std::array<double, kActionCount>& lp, RngStream& rng) {
  const double u = rng.uniform();
  double c = 0.0;
  int last_valid = kNoOpAction;
  for (int i = 0; i < kActionCount; ++i) {
    if (lp[static_cast<std::size_t>(i)] == kNegInf) continue;
    c += std::exp(lp[static_cast<std::size_t>(i)]);
    last_valid = i;
    if (u < c) return i;
  }
  return last_valid;
}

}  // namespace

MlpSpec ppo_policy_spec(std::size_t input_dim, const std::vector<std::size_t>& hidden, bool gated) {
  MlpSpec s;
  s.input_dim = input_dim;
  s.hidden = hidden;
  if (gated)
    s.heads = {{"nonplant", kNonPlantCount, 0.01}, {"plant", kPlantCount, 0.01}, {"gate", 1, 0.01}};
  else
    s.heads = {{"logits", static_cast<std::size_t>(kActionCount), 0.01}};
  return s;
}

MlpSpec ppo_value_spec(std::size_t input_dim, const std::vector<std::size_t>& hidden) {
  MlpSpec s;
  s.input_dim = input_dim;
  s.hidden = hidden;
  s.heads = {{"value", 1, 1.0}};
  return s;
}

std::array<double, kActionCount> policy_log_probs(const Mlp& policy, const ForwardCache& cache,
                                                  const ActionMask& mask) {
  std::array<double, kActionCount> out{};
  if (!is_gated(policy)) {
    const auto& z = cache.heads[0];
    const double lse = log_sum_exp(z.data(), z.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = z[i] - lse;
    return out;
  }
  const auto l = hierarchical_log_probs(cache);
  const auto valid = mask.as_array();
  std::array<double, kActionCount> masked{};
  for (std::size_t i = 0; i < masked.size(); ++i) masked[i] = valid[i] ? l[i] : kNegInf;
  const double lse = log_sum_exp(masked.data(), masked.size());
  require(lse != kNegInf, "policy_log_probs: every action is masked");
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = valid[i] ? l[i] - lse : kNegInf;
  return out;
}

std::vector<std::vector<double>> policy_head_gradients(
    const Mlp& policy, const ForwardCache& cache, const ActionMask& mask,
    const std::array<double, kActionCount>& g) {
  const auto lp = policy_log_probs(policy, cache, mask);
  if (!is_gated(policy)) {
    double sum = 0.0;
    for (double v : g) sum += v;
    std::vector<double> d(kActionCount);
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = g[k] - std::exp(lp[k]) * sum;
    return {d};
  }
  // Through the renormalization over the valid set.
  const auto valid = mask.as_array();
  double sum_g = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (valid[k]) sum_g += g[k];
  std::array<double, kActionCount> dl{};
  for (std::size_t k = 0; k < dl.size(); ++k)
    dl[k] = valid[k] ? g[k] - std::exp(lp[k]) * sum_g : 0.0;

  // Through the hierarchical composition.
  const auto& np = cache.heads[0];
  const auto& pl = cache.heads[1];
  const double sigma = sigmoid(cache.heads[2][0]);
  const double lse_np = log_sum_exp(np.data(), np.size());
  const double lse_pl = log_sum_exp(pl.data(), pl.size());
  double sum_np = 0.0, sum_pl = 0.0;
  for (std::size_t i = 0; i < kNonPlantCount; ++i) sum_np += dl[i];
  for (std::size_t i = 0; i < kPlantCount; ++i) sum_pl += dl[kNonPlantCount + i];
  std::vector<double> d_np(kNonPlantCount), d_pl(kPlantCount), d_gate(1);
  for (std::size_t i = 0; i < kNonPlantCount; ++i)
    d_np[i] = dl[i] - std::exp(np[i] - lse_np) * sum_np;
  for (std::size_t i = 0; i < kPlantCount; ++i)
    d_pl[i] = dl[kNonPlantCount + i] - std::exp(pl[i] - lse_pl) * sum_pl;
  d_gate[0] = (1.0 - sigma) * sum_pl - sigma * sum_np;
  return {d_np, d_pl, d_gate};
}

std::vector<double> compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                                const std::vector<bool>& dones, double last_value, double gamma,
                                double lambda) {
  const std::size_t n = rewards.size();
  require(values.size() == n && dones.size() == n, "compute_gae: ragged inputs");
  std::vector<double> adv(n);
  double next_adv = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    const double next_value = t + 1 < n ? values[t + 1] : last_value;
    const double live = dones[t] ? 0.0 : 1.0;
    const double delta = rewards[t] + gamma * next_value * live - values[t];
    next_adv = delta + gamma * lambda * live * next_adv;
    adv[t] = next_adv;
  }
  return adv;
}

namespace {

struct Transition {
  std::vector<double> observation;
  ActionMask mask;
  int action = 0;
  double log_prob = 0.0;
  double value = 0.0;
  double reward = 0.0;
  bool done = false;
};

class PpoLearner {
 public:
  PpoLearner(std::size_t obs_dim, const PpoConfig& cfg)
      : cfg_(cfg),
        policy_(ppo_policy_spec(obs_dim, cfg.hidden, cfg.gated)),
        value_(ppo_value_spec(obs_dim, cfg.hidden)),
        action_rng_(RngStream::split(cfg.seed, StreamId::kPolicy)),
        shuffle_rng_(derive_seed(cfg.seed, 104)) {
    require(cfg.rollout_steps > 0 && cfg.minibatch > 0 && cfg.epochs > 0,
            "PPO: rollout, minibatch and epochs must be positive");
    RngStream pi_rng(derive_seed(cfg.seed, 101));
    RngStream v_rng(derive_seed(cfg.seed, 102));
    policy_.initialize(pi_rng);
    value_.initialize(v_rng);
    pi_tape_ = policy_.make_tape();
    v_tape_ = value_.make_tape();
  }

  int act(const std::vector<double>& obs, const ActionMask& mask) {
    policy_.forward(obs, cache_);
    const ActionMask effective = cfg_.gated ? mask : ActionMask{};
    const auto lp = policy_log_probs(policy_, cache_, effective);
    const int a = sample_from_log_probs(lp, action_rng_);
    value_.forward(obs, vcache_);
    pending_ = {obs, effective, a, lp[static_cast<std::size_t>(a)], vcache_.heads[0][0], 0.0, false};
    return a;
  }

  /// Completes the pending transition; updates when the buffer is full.
  void observe(double reward, bool done, const std::vector<double>& next_obs) {
    pending_.reward = reward;
    pending_.done = done;
    buffer_.push_back(std::move(pending_));
    if (buffer_.size() >= cfg_.rollout_steps) update(next_obs);
  }

  void flush() {
    if (!buffer_.empty()) update({});
  }

  const Mlp& policy() const { return policy_; }
  const Mlp& value() const { return value_; }

 private:
  void update(const std::vector<double>& next_obs) {
    const std::size_t n = buffer_.size();
    double last_value = 0.0;
    if (!buffer_.back().done && !next_obs.empty()) {
      value_.forward(next_obs, vcache_);
      last_value = vcache_.heads[0][0];
    }
    std::vector<double> rewards(n), values(n);
    std::vector<bool> dones(n);
    for (std::size_t i = 0; i < n; ++i) {
      rewards[i] = buffer_[i].reward;
      values[i] = buffer_[i].value;
      dones[i] = buffer_[i].done;
    }
    const std::vector<double> adv = compute_gae(rewards, values, dones, last_value, cfg_.gamma,
                                                cfg_.gae_lambda);
    std::vector<double> returns(n);
    for (std::size_t i = 0; i < n; ++i) returns[i] = adv[i] + values[i];

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t epoch = 0; epoch < cfg_.epochs; ++epoch) {
      for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[shuffle_rng_.below(i)]);
      for (std::size_t start = 0; start < n; start += cfg_.minibatch) {
        const std::size_t end = std::min(n, start + cfg_.minibatch);
        minibatch_update(order, start, end, adv, returns);
      }
    }
    buffer_.clear();
  }

  void minibatch_update(const std::vector<std::size_t>& order, std::size_t start, std::size_t end,
                        const std::vector<double>& adv, const std::vector<double>& returns) {
    const std::size_t m = end - start;
    const double inv_m = 1.0 / static_cast<double>(m);
    double mean = 0.0, var = 0.0;
    for (std::size_t k = start; k < end; ++k) mean += adv[order[k]];
    mean *= inv_m;
    for (std::size_t k = start; k < end; ++k) var += (adv[order[k]] - mean) * (adv[order[k]] - mean);
    const double stddev = m > 1 ? std::sqrt(var / static_cast<double>(m - 1)) : 0.0;

    pi_tape_.zero_gradient();
    v_tape_.zero_gradient();
    std::vector<std::vector<double>> vgrad(1, std::vector<double>(1));
    for (std::size_t k = start; k < end; ++k) {
      const Transition& tr = buffer_[order[k]];
      const double a_hat = m > 1 ? (adv[order[k]] - mean) / (stddev + 1e-8) : adv[order[k]];

      policy_.forward(tr.observation, cache_);
      const auto lp = policy_log_probs(policy_, cache_, tr.mask);
      const double ratio = std::exp(lp[static_cast<std::size_t>(tr.action)] - tr.log_prob);
      std::array<double, kActionCount> g{};
      const double clipped = std::clamp(ratio, 1.0 - cfg_.clip, 1.0 + cfg_.clip);
      if (ratio * a_hat <= clipped * a_hat) g[static_cast<std::size_t>(tr.action)] = -a_hat * ratio * inv_m;
      if (cfg_.entropy_coef != 0.0) {
        // Loss term -c H with H = -sum p log p over valid actions.
        for (std::size_t j = 0; j < g.size(); ++j) {
          if (lp[j] == kNegInf) continue;
          g[j] += cfg_.entropy_coef * inv_m * std::exp(lp[j]) * (lp[j] + 1.0);
        }
      }
      policy_.backward(cache_, policy_head_gradients(policy_, cache_, tr.mask, g), pi_tape_.gradient);

      value_.forward(tr.observation, vcache_);
      vgrad[0][0] = 2.0 * cfg_.value_coef * (vcache_.heads[0][0] - returns[order[k]]) * inv_m;
      value_.backward(vcache_, vgrad, v_tape_.gradient);
    }
    const AdamHyper hyper{0.9, 0.999, cfg_.adam_epsilon};
    pi_tape_.clip_gradient_norm(cfg_.max_grad_norm);
    v_tape_.clip_gradient_norm(cfg_.max_grad_norm);
    adam_step(policy_, pi_tape_, cfg_.learning_rate, hyper);
    adam_step(value_, v_tape_, cfg_.learning_rate, hyper);
  }

  PpoConfig cfg_;
  Mlp policy_;
  Mlp value_;
  GradientTape pi_tape_;
  GradientTape v_tape_;
  RngStream action_rng_;
  RngStream shuffle_rng_;
  ForwardCache cache_;
  ForwardCache vcache_;
  Transition pending_;
  std::vector<Transition> buffer_;
};

/// Learned episode filter over the site-context slice.
class Selector {
 public:
  Selector(std::size_t input_dim, const CurriculumConfig& cfg, std::uint64_t seed)
      : cfg_(cfg), tau_(cfg.initial_threshold) {
    MlpSpec s;
    s.input_dim = input_dim;
    s.hidden = cfg.hidden;
    s.heads = {{"score", 1, 1.0}};
    net_ = Mlp(s);
    RngStream rng(derive_seed(seed, 103));
    net_.initialize(rng);
    tape_ = net_.make_tape();
  }

  double score(const std::vector<double>& x) {
    if (cfg_.frozen_score) return *cfg_.frozen_score;
    net_.forward(x, cache_);
    return sigmoid(cache_.heads[0][0]);
  }

  bool decide(double score, CurriculumStats& stats) {
    const bool accept = stats.decisions < cfg_.warmup_episodes || score >= tau_;
    ++stats.decisions;
    if (accept) ++stats.accepted;
    window_.push_back(accept);
    if (window_.size() > cfg_.window) window_.pop_front();
    if (stats.decisions > cfg_.warmup_episodes && window_.size() >= cfg_.window) {
      const double rate = window_rate();
      if (rate == 0.0) {
        tau_ *= 0.5;
        window_.clear();
        ++stats.deadlock_resets;
      } else if (rate < cfg_.band_low) {
        tau_ = std::max(0.0, tau_ - cfg_.threshold_step);
      } else if (rate > cfg_.band_high) {
        tau_ = std::min(1.0, tau_ + cfg_.threshold_step);
      }
    }
    stats.threshold = tau_;
    return accept;
  }

  double window_rate() const {
    if (window_.empty()) return 1.0;
    return static_cast<double>(std::count(window_.begin(), window_.end(), true)) /
           static_cast<double>(window_.size());
  }

  double threshold() const { return tau_; }

  void learn(const std::vector<double>& x, double episode_return) {
    if (cfg_.frozen_score) return;
    buffer_.emplace_back(x, episode_return);
    if (buffer_.size() > cfg_.buffer_size) buffer_.pop_front();
    double lo = buffer_.front().second, hi = lo;
    for (const auto& [_, r] : buffer_) {
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    const double span = hi - lo;
    const double inv_n = 1.0 / static_cast<double>(buffer_.size());
    std::vector<std::vector<double>> g(1, std::vector<double>(1));
    for (std::size_t u = 0; u < cfg_.updates_per_episode; ++u) {
      tape_.zero_gradient();
      for (const auto& [input, r] : buffer_) {
        const double target = span > 0.0 ? (r - lo) / span : 0.5;
        net_.forward(input, cache_);
        const double s = sigmoid(cache_.heads[0][0]);
        g[0][0] = 2.0 * (s - target) * s * (1.0 - s) * inv_n;
        net_.backward(cache_, g, tape_.gradient);
      }
      adam_step(net_, tape_, cfg_.learning_rate);
    }
  }

  const Mlp& network() const { return net_; }

 private:
  CurriculumConfig cfg_;
  Mlp net_;
  GradientTape tape_;
  ForwardCache cache_;
  double tau_;
  std::deque<bool> window_;
  std::deque<std::pair<std::vector<double>, double>> buffer_;
};

TrainResult train_ppo_impl(MoTask& task, const PpoConfig& cfg, const CurriculumConfig* cur,
                           const TrainCallbacks& cb, CurriculumStats* stats_out,
                           std::vector<std::pair<std::uint64_t, bool>>* decisions) {
  const std::string algorithm = cur ? "curriculum_ppo" : "ppo_gated";
  PpoLearner learner(task.observation_size(), cfg);
  auto [ctx_begin, ctx_end] = task.site_context();
  if (ctx_begin >= ctx_end) {
    ctx_begin = 0;
    ctx_end = task.observation_size();
  }
  std::optional<Selector> selector;
  if (cur) selector.emplace(ctx_end - ctx_begin, *cur, cfg.seed);
  CurriculumStats stats;
  stats.threshold = cur ? cur->initial_threshold : 0.0;

  TrainResult result;
  auto snapshot = [&] {
    Checkpoint c;
    c.algorithm = algorithm;
    c.networks = {{"policy", learner.policy()}, {"value", learner.value()}};
    if (selector) c.networks.emplace_back("selector", selector->network());
    c.seeds = {{"seed", cfg.seed}};
    c.metadata = {{"horizon", std::to_string(task.horizon())},
                  {"observation_size", std::to_string(task.observation_size())},
                  {"gated", cfg.gated ? "1" : "0"}};
    return c;
  };

  std::uint64_t episode = 0;
  std::uint64_t accepted_episodes = 0;
  while (result.total_steps < cfg.total_steps) {
    const double lambda =
        episode_preference(cfg.preference_mode, cfg.fixed_preference, cfg.seed, episode);
    std::vector<double> obs = task.reset(episode, lambda);
    EpisodeLog log;
    log.episode = episode;
    log.preference = lambda;
    std::vector<double> context;
    if (selector) {
      context.assign(obs.begin() + static_cast<std::ptrdiff_t>(ctx_begin),
                     obs.begin() + static_cast<std::ptrdiff_t>(ctx_end));
      log.selection_score = selector->score(context);
      const bool accept = selector->decide(log.selection_score, stats);
      if (decisions) decisions->emplace_back(episode, accept);
      log.threshold = selector->threshold();
      log.acceptance_rate = selector->window_rate();
      if (!accept) {
        ++episode;
        continue;
      }
    }
    for (;;) {
      const int a = learner.act(obs, task.action_mask());
      TaskStep s = task.step(a);
      learner.observe(s.reward.scalarize(lambda), s.done, s.observation);
      log.carbon_return += s.reward.r_carbon;
      log.thaw_return += s.reward.r_thaw;
      log.final_density = s.density;
      log.final_conifer = s.conifer_fraction;
      if (cfg.keep_step_records) log.steps.push_back({a, s.reward, s.density, s.conifer_fraction});
      ++result.total_steps;
      obs = std::move(s.observation);
      if (s.done) break;
    }
    log.scalarized_return = lambda * log.carbon_return + (1.0 - lambda) * log.thaw_return;
    log.total_steps = result.total_steps;
    if (selector) selector->learn(context, log.scalarized_return);
    if (cb.on_episode) cb.on_episode(log);
    if (!cfg.keep_step_records) log.steps.clear();
    result.curve.push_back(std::move(log));
    ++episode;
    ++accepted_episodes;
    if (cb.on_checkpoint && cb.checkpoint_every > 0 && accepted_episodes % cb.checkpoint_every == 0)
      cb.on_checkpoint(snapshot(), episode);
  }
  learner.flush();
  result.episodes_seen = episode;
  result.checkpoint = snapshot();
  if (stats_out) *stats_out = stats;
  return result;
}

}  // namespace

TrainResult train_ppo_gated(MoTask& task, const PpoConfig& cfg, const TrainCallbacks& cb) {
  return train_ppo_impl(task, cfg, nullptr, cb, nullptr, nullptr);
}

TrainResult train_curriculum_ppo(MoTask& task, const PpoConfig& cfg, const CurriculumConfig& cur,
                                 const TrainCallbacks& cb, CurriculumStats* stats,
                                 std::vector<std::pair<std::uint64_t, bool>>* decisions) {
  require(cur.band_low <= cur.band_high, "curriculum: band_low must not exceed band_high");
  require(cur.window > 0, "curriculum: window must be positive");
  return train_ppo_impl(task, cfg, &cur, cb, stats, decisions);
}

}  // namespace boreal
