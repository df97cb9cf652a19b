#include "boreal/env.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "boreal/errors.hpp"

namespace boreal {

namespace {

double clip(double x, double lo, double hi) { return std::clamp(x, lo, hi); }

int slot_of(const std::array<double, 5>& values, double v, const char* what) {
  for (int i = 0; i < 5; ++i)
    if (values[static_cast<std::size_t>(i)] == v) return i;
  throw ContractViolation(std::string("encode_action: invalid ") + what);
}

}  // namespace

ActionPair decode_action(int index) {
  require(index >= 0 && index < kActionCount,
          "decode_action: index " + std::to_string(index) + " outside [0, 24]");
  return {kDensityChanges[static_cast<std::size_t>(index / 5)],
          kConiferTargets[static_cast<std::size_t>(index % 5)]};
}

int encode_action(const ActionPair& a) {
  return 5 * slot_of(kDensityChanges, a.density_change, "density change") +
         slot_of(kConiferTargets, a.conifer_target, "conifer target");
}

double preference_grid_value(std::size_t slot) {
  require(slot < kPreferenceGridSize, "preference_grid_value: slot out of range");
  return static_cast<double>(slot) / 10.0;
}

std::vector<double> preference_grid() {
  std::vector<double> g(kPreferenceGridSize);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = preference_grid_value(i);
  return g;
}

PenaltyState stock_penalties(const StandState& s, const EnvConstants& c) {
  PenaltyState p;
  p.biomass = std::max(0.0, s.biomass_carbon - c.biomass_limit) / c.biomass_limit *
              c.carbon_limit_penalty;
  p.soil = std::max(0.0, s.soil_carbon - c.soil_limit) / c.soil_limit * c.carbon_limit_penalty;
  p.density = s.age.total() >= c.max_density ? c.max_density_penalty : 0.0;
  return p;
}

RewardVector compute_reward(const AnnualMetrics& m, const StandState& s,
                            const ManagementOutcome& outcome, const EnvConstants& c,
                            RewardBreakdown* breakdown) {
  RewardBreakdown b;
  b.carbon_change = clip(m.net_carbon_change / c.max_carbon_change, -1.0, 1.0);
  b.stock_bonus = c.stock_bonus_multiplier *
                  clip((s.biomass_carbon + s.soil_carbon) / c.max_total_carbon, 0.0, 1.0);
  b.hwp_bonus = c.hwp_sale_reward_multiplier * clip(m.hwp_stored / c.max_hwp_sales, 0.0, 1.0);
  const PenaltyState pen = stock_penalties(s, c);
  b.biomass_penalty = pen.biomass;
  b.soil_penalty = pen.soil;
  b.density_penalty = pen.density;
  b.ineffective_penalty = (outcome.ineffective_thinning ? c.ineffective_thinning_penalty : 0.0) +
                          (outcome.ineffective_planting ? c.ineffective_planting_penalty : 0.0);
  b.thaw_signal = m.f_n - c.warming_penalty_factor * m.f_p;

  RewardVector r;
  r.r_carbon = b.carbon_change + b.stock_bonus + b.hwp_bonus -
               (b.biomass_penalty + b.soil_penalty) - b.density_penalty - b.ineffective_penalty;
  r.r_thaw = clip(b.thaw_signal / c.max_thaw_degree_days, -1.0, 1.0);
  if (breakdown) *breakdown = b;
  return r;
}

void ObservationHistory::record(const AnnualMetrics& m, const ActionPair& action) {
  fire_fraction = {m.disturbance.fire_mortality_fraction, fire_fraction[0]};
  insect_fraction = {m.disturbance.insect_mortality_fraction, insect_fraction[0]};
  drought_index = {m.drought_index_peak, drought_index[0]};
  biomass_change = m.carbon.delta_biomass();
  soil_change = m.carbon.delta_soil();
  total_change = biomass_change + soil_change;
  natural_mortality = m.carbon.natural_mortality;
  litterfall = m.carbon.litterfall_annual;
  thinning_loss = m.carbon.thinning_removed;
  hwp_stored = m.hwp_stored;
  const int index = encode_action(action);
  density_slot = index / 5;
  mix_slot = index % 5;
  density_change = action.density_change;
  mix_change = m.management.conifer_fraction_after - m.management.conifer_fraction_before;
}

std::vector<double> build_observation(const StandState& s, const SiteParameters& p,
                                      const ObservationHistory& h, double w_carbon, EnvMode mode,
                                      const EnvConstants& c) {
  std::vector<double> o;
  o.reserve(mode == EnvMode::kGeneralist ? kGeneralistObservationSize : kBaseObservationSize);
  const double density = s.age.total();

  o.push_back(w_carbon);
  o.push_back(s.year / c.year_normalizer);
  o.push_back(density / 1500.0);
  o.push_back(s.age.conifer_fraction());
  o.push_back((s.biomass_carbon + s.soil_carbon) / c.max_total_carbon);

  o.push_back((p.latitude - 50.0) / 20.0);
  o.push_back((p.mean_annual_temp_offset + 10.0) / 20.0);
  o.push_back(p.seasonal_amplitude / 30.0);
  o.push_back(p.growth_start_day / 365.0);
  o.push_back(p.fall_start_day / 365.0);
  o.push_back((p.fall_start_day - p.growth_start_day) / 200.0);

  o.push_back(h.fire_fraction[0]);
  o.push_back(h.fire_fraction[1]);
  o.push_back(h.insect_fraction[0]);
  o.push_back(h.insect_fraction[1]);
  o.push_back(h.drought_index[0] / 100.0);
  o.push_back(h.drought_index[1] / 100.0);

  o.push_back((h.biomass_change + 0.5) / 1.0);
  o.push_back((h.soil_change + 0.2) / 0.4);
  o.push_back((h.total_change + 0.7) / 1.4);
  o.push_back(h.natural_mortality / 0.5);
  o.push_back(h.litterfall / 2.0);
  o.push_back((h.thinning_loss + 0.5) / 1.0);
  o.push_back(h.hwp_stored / 0.5);

  o.push_back(h.density_slot / 4.0);
  o.push_back(h.mix_slot / 4.0);
  o.push_back((h.density_change + 100.0) / 200.0);
  o.push_back(h.mix_change);

  for (std::size_t sp = 0; sp < kSpeciesCount; ++sp)
    for (std::size_t k = 0; k < kAgeClassCount; ++k)
      o.push_back(density > 0.0 ? s.age.stems[sp][k] / density : 0.0);

  o.push_back(s.biomass_carbon / c.max_total_carbon);
  o.push_back(s.soil_carbon / c.max_total_carbon);

  const PenaltyState pen = stock_penalties(s, c);
  o.push_back(pen.biomass / c.carbon_limit_penalty);
  o.push_back(pen.soil / c.carbon_limit_penalty);
  o.push_back(pen.density / c.max_density_penalty);

  if (mode == EnvMode::kGeneralist) {
    const auto site = normalize_site_parameters(p);
    o.insert(o.end(), site.begin(), site.end());
  }
  return o;
}

EpisodeSeeds episode_seeds(EnvMode mode, std::uint64_t base_seed, std::uint64_t site_seed,
                           std::uint64_t episode_index) {
  const std::uint64_t episode =
      derive_seed(derive_seed(base_seed, static_cast<std::uint64_t>(StreamId::kEpisode)), episode_index);
  EpisodeSeeds s;
  s.preference = derive_seed(episode, static_cast<std::uint64_t>(StreamId::kPreference));
  const std::uint64_t root = mode == EnvMode::kGeneralist ? episode : site_seed;
  s.site = mode == EnvMode::kGeneralist
               ? derive_seed(episode, static_cast<std::uint64_t>(StreamId::kParameters))
               : site_seed;
  s.weather = derive_seed(root, static_cast<std::uint64_t>(StreamId::kWeather));
  s.disturbance = derive_seed(root, static_cast<std::uint64_t>(StreamId::kDisturbance));
  return s;
}

bool ActionMask::allows(int action) const {
  require(action >= 0 && action < kActionCount, "ActionMask::allows: index out of range");
  if (action >= 15) return plant_allowed;
  if (action < 10) return thin_allowed;
  return true;
}

std::array<bool, kActionCount> ActionMask::as_array() const {
  std::array<bool, kActionCount> a{};
  for (int i = 0; i < kActionCount; ++i) a[static_cast<std::size_t>(i)] = allows(i);
  return a;
}

std::pair<SiteParameters, StandState> episode_site(const EpisodeConfig& cfg) {
  RngStream rng = RngStream::split(cfg.seeds.site, StreamId::kParameters);
  SiteParameters p = sample_site_parameters(rng);
  apply_parameter_pins(p, cfg.pins);
  if (auto problem = validate_site_parameters(p)) throw ConfigError("site parameters: " + *problem);
  StandState s = default_initial_stand();
  if (cfg.mode == EnvMode::kGeneralist) {
    const double j = cfg.initial_pool_jitter;
    s.biomass_carbon *= rng.uniform(1.0 - j, 1.0 + j);
    s.soil_carbon *= rng.uniform(1.0 - j, 1.0 + j);
  }
  return {p, s};
}

std::vector<double> ForestEnv::reset(const EpisodeConfig& cfg) {
  require(cfg.preference_mode == PreferenceMode::kSampled ||
              (cfg.preference >= 0.0 && cfg.preference <= 1.0),
          "ForestEnv::reset: preference outside [0, 1]");
  require(cfg.constants.horizon > 0, "ForestEnv::reset: horizon must be positive");
  cfg_ = cfg;
  if (cfg_.mode == EnvMode::kSiteSpecific) cfg_.sim.temperature_noise = false;
  auto [p, s] = episode_site(cfg_);
  cfg_.sim.management.min_thinning_density = cfg_.constants.safe_min_density;
  cfg_.sim.management.max_density = cfg_.constants.max_density;
  sim_.emplace(p, s, cfg_.seeds.weather, cfg_.seeds.disturbance, cfg_.sim);
  if (cfg_.spin_up) sim_->spin_up();
  history_ = ObservationHistory{};
  if (cfg_.preference_mode == PreferenceMode::kSampled) {
    RngStream rng(cfg_.seeds.preference);
    preference_ = preference_grid_value(rng.below(kPreferenceGridSize));
  } else {
    preference_ = cfg_.preference;
  }
  done_ = false;
  return observation();
}

StepResult ForestEnv::step(int action) {
  require(sim_.has_value() && !done_, "ForestEnv::step: episode finished or not reset");
  const ActionPair pair = decode_action(action);
  StepResult r;
  r.info = sim_->simulate_year(pair);
  r.reward = compute_reward(r.info, sim_->stand(), r.info.management, cfg_.constants);
  history_.record(r.info, pair);
  r.terminated = sim_->stand().year >= cfg_.constants.horizon;
  done_ = r.terminated;
  r.observation = observation();
  return r;
}

std::size_t ForestEnv::observation_size() const {
  return cfg_.mode == EnvMode::kGeneralist ? kGeneralistObservationSize : kBaseObservationSize;
}

int ForestEnv::year() const { return sim_ ? sim_->stand().year : 0; }

ActionMask ForestEnv::action_mask() const {
  require(sim_.has_value(), "ForestEnv::action_mask: not reset");
  const double density = sim_->stand().age.total();
  return {density < cfg_.constants.max_density, density > cfg_.constants.safe_min_density};
}

const SiteParameters& ForestEnv::site() const {
  require(sim_.has_value(), "ForestEnv::site: not reset");
  return sim_->params();
}

const StandState& ForestEnv::stand() const {
  require(sim_.has_value(), "ForestEnv::stand: not reset");
  return sim_->stand();
}

std::vector<double> ForestEnv::observation() const {
  require(sim_.has_value(), "ForestEnv::observation: not reset");
  return build_observation(sim_->stand(), sim_->params(), history_, preference_, cfg_.mode,
                           cfg_.constants);
}

}  // namespace boreal
