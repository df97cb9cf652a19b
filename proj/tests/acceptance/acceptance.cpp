#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>
#include <unistd.h>

#include "CLI11.hpp"
#include "boreal/agents.hpp"
#include "boreal/env.hpp"
#include "boreal/eval.hpp"
#include "boreal/sim.hpp"
#include "cli.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "synthetic_tasks.hpp"

namespace boreal::acceptance {
namespace {

namespace fs = std::filesystem;

// Pinned tolerances.
constexpr double kRewardTol = 1e-12;
constexpr double kNormalizationTol = 1e-15;
constexpr double kCanopyResidualTol = 1e-3;   // W m-2
constexpr double kWaterClosureTol = 1e-6;     // relative
constexpr double kCarbonClosureTol = 1e-9;    // relative
constexpr double kGradientTol = 1e-5;         // relative
constexpr double kCanopyOracleTol = 0.01;     // K
constexpr double kPlantingFrequency = 0.9;
constexpr double kBadClusterAcceptance = 0.1;
constexpr double kEpisodeBudgetSeconds = 2.0;
constexpr double kLearningBudgetSeconds = 1800.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const Outcome& o) {
  std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  if (!o.pass) ++failures;
}

void info(const std::string& line) { std::cout << "INFO " << line << std::endl; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

// ---- contracts ----

Outcome action_table() {
  const double density[5] = {-100.0, -50.0, 0.0, 50.0, 100.0};
  const double mix[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
  int wrong = 0;
  for (int row = 0; row < 5; ++row)
    for (int col = 0; col < 5; ++col) {
      const ActionPair a = decode_action(5 * row + col);
      if (a.density_change != density[row] || a.conifer_target != mix[col]) ++wrong;
    }
  return {wrong == 0, fmt::format("{} of 25 indices differ from the table", wrong)};
}

Outcome observation_dimensions() {
  int bad = 0, steps = 0;
  for (EnvMode mode : {EnvMode::kSiteSpecific, EnvMode::kGeneralist}) {
    const std::size_t want = mode == EnvMode::kGeneralist ? 105 : 43;
    EpisodeConfig cfg;
    cfg.mode = mode;
    cfg.sim.dt_minutes = 180;
    cfg.seeds = episode_seeds(mode, 7, 7, 0);
    ForestEnv env;
    bad += env.reset(cfg).size() != want;
    RngStream actions(11);
    while (!env.done()) {
      bad += env.step(static_cast<int>(actions.below(kActionCount))).observation.size() != want;
      ++steps;
    }
  }
  return {bad == 0, fmt::format("{} wrong sizes over {} steps and 2 resets", bad, steps)};
}

StandState hand_stand() {
  StandState s;
  s.age.stems[0] = {100.0, 0.0, 200.0, 300.0, 100.0};
  s.age.stems[1] = {0.0, 100.0, 100.0, 100.0, 0.0};
  s.biomass_carbon = 12.0;
  s.soil_carbon = 18.0;
  s.year = 25;
  return s;
}

SiteParameters hand_site() {
  SiteParameters p = default_site_parameters();
  p.latitude = 60.0;
  p.mean_annual_temp_offset = -6.0;
  p.seasonal_amplitude = 21.0;
  p.growth_start_day = 140.0;
  p.fall_start_day = 270.0;
  return p;
}

AnnualMetrics hand_year(double fire, double insect, double drought) {
  AnnualMetrics m;
  m.disturbance.fire_mortality_fraction = fire;
  m.disturbance.insect_mortality_fraction = insect;
  m.drought_index_peak = drought;
  m.carbon.biomass_before = 10.0;
  m.carbon.biomass_end = 10.25;
  m.carbon.soil_before = 20.0;
  m.carbon.soil_end = 19.875;
  m.carbon.natural_mortality = 0.25;
  m.carbon.litterfall_annual = 1.0;
  m.carbon.thinning_removed = 0.25;
  m.hwp_stored = 0.125;
  m.management.conifer_fraction_before = 0.5;
  m.management.conifer_fraction_after = 0.75;
  return m;
}

Outcome observation_normalizations() {
  ObservationHistory h;
  h.record(hand_year(0.3, 0.02, 40.0), {-100.0, 0.0});
  h.record(hand_year(0.0, 0.01, 60.0), decode_action(8));  // (-50, 0.75)
  const SiteParameters p = hand_site();
  const StandState s = hand_stand();
  const auto o = build_observation(s, p, h, 0.3, EnvMode::kGeneralist);

  // Expected values from the table's normalization column applied by hand.
  const std::vector<double> expected{
      0.3, 0.5, 1000.0 / 1500.0, 0.7, 0.6,                          // preference, state
      0.5, 0.2, 0.7, 140.0 / 365.0, 270.0 / 365.0, 0.65,            // climate
      0.0, 0.3, 0.01, 0.02, 0.6, 0.4,                               // disturbances
      0.75, 0.1875, 0.825 / 1.4, 0.5, 0.5, 0.75, 0.25,              // carbon recents
      0.25, 0.75, 0.25, 0.25,                                       // management recents
      0.1, 0.0, 0.2, 0.3, 0.1, 0.0, 0.1, 0.1, 0.1, 0.0,             // age shares
      0.24, 0.36,                                                   // stocks
      0.0, 0.0, 0.0};                                               // penalties
  int wrong = 0;
  std::string first;
  if (o.size() != 105) return {false, fmt::format("generalist observation has {} entries", o.size())};
  for (std::size_t i = 0; i < expected.size(); ++i)
    if (std::abs(o[i] - expected[i]) > kNormalizationTol) {
      if (first.empty()) first = fmt::format(" (first: index {} = {} vs {})", i, o[i], expected[i]);
      ++wrong;
    }

  // Site context: latitude 60 in [56, 65].
  const std::size_t lat = *find_parameter_slot("latitude");
  if (std::abs(o[43 + lat] - 4.0 / 9.0) > kNormalizationTol) ++wrong;
  const auto site = normalize_site_parameters(p);
  for (std::size_t i = 0; i < site.size(); ++i) wrong += o[43 + i] != site[i];

  // Penalty rows on a crowded, over-stocked stand.
  StandState crowded = hand_stand();
  crowded.age.stems[0][3] += 1000.0;
  crowded.biomass_carbon = 18.0;
  crowded.soil_carbon = 25.0;
  const auto oc = build_observation(crowded, p, {}, 0.3, EnvMode::kSiteSpecific);
  const double pen_expected[3] = {0.2, 0.25, 1.0};
  for (int k = 0; k < 3; ++k)
    if (std::abs(oc[40 + k] - pen_expected[k]) > kNormalizationTol) ++wrong;

  // A fresh history sits at the zero-input values of the affine maps.
  const auto fresh = build_observation(s, p, {}, 0.3, EnvMode::kSiteSpecific);
  const double fresh_expected[17] = {0, 0, 0, 0, 0, 0, 0.5, 0.5, 0.5, 0, 0, 0.5, 0, 0, 0, 0.5, 0};
  for (int k = 0; k < 17; ++k)
    if (std::abs(fresh[11 + k] - fresh_expected[k]) > kNormalizationTol) ++wrong;

  return {wrong == 0, fmt::format("{} mismatching entries over 43 + 62 + 3 + 17 checks{}", wrong, first)};
}

struct RewardCase {
  const char* name;
  double delta_c, f_p, f_n, hwp;
  double density, biomass, soil;
  bool bad_thin, bad_plant;
  double r_carbon, r_thaw;
};

StandState stand_with(double density, double biomass, double soil) {
  StandState s;
  s.age.at(Species::kConifer, AgeClass::kMature) = density;
  s.biomass_carbon = biomass;
  s.soil_carbon = soil;
  return s;
}

Outcome reward_table() {
  const RewardCase cases[] = {
      {"dC +2 clip edge", 2.0, 0, 0, 0, 1000, 4, 10, false, false, 1.0, 0.0},
      {"dC -2 clip edge", -2.0, 0, 0, 0, 1000, 4, 10, false, false, -1.0, 0.0},
      {"dC +3 clipped", 3.0, 0, 0, 0, 1000, 4, 10, false, false, 1.0, 0.0},
      {"dC -5 clipped", -5.0, 0, 0, 0, 1000, 4, 10, false, false, -1.0, 0.0},
      {"dC +1", 1.0, 0, 0, 0, 1000, 4, 10, false, false, 0.5, 0.0},
      {"dC -0.5", -0.5, 0, 0, 0, 1000, 4, 10, false, false, -0.25, 0.0},
      {"biomass 16.5", 0.0, 0, 0, 0, 1000, 16.5, 10, false, false, -0.05, 0.0},
      {"soil 24", 0.0, 0, 0, 0, 1000, 4, 24, false, false, -0.1, 0.0},
      {"biomass and soil", 0.0, 0, 0, 0, 1000, 16.5, 24, false, false, -0.15, 0.0},
      {"density at cap", 0.0, 0, 0, 0, 2000, 4, 10, false, false, -1.0, 0.0},
      {"density below cap", 0.0, 0, 0, 0, 1999, 4, 10, false, false, 0.0, 0.0},
      {"ineffective thinning", 0.0, 0, 0, 0, 1000, 4, 10, true, false, -0.5, 0.0},
      {"ineffective planting", 0.0, 0, 0, 0, 1000, 4, 10, false, true, -1.0, 0.0},
      {"penalty stacking", 1.0, 0, 0, 0, 2000, 18, 30, true, true, -2.35, 0.0},
      {"hwp bonus disabled", 0.0, 0, 0, 0.8, 1000, 4, 10, false, false, 0.0, 0.0},
      {"f_p 8 f_n 0", 0.0, 8, 0, 0, 1000, 4, 10, false, false, 0.0, -1.0},
      {"f_n 40", 0.0, 0, 40, 0, 1000, 4, 10, false, false, 0.0, 1.0},
      {"f_n 20", 0.0, 0, 20, 0, 1000, 4, 10, false, false, 0.0, 0.5},
      {"f_p 2", 0.0, 2, 0, 0, 1000, 4, 10, false, false, 0.0, -0.25},
      {"f_p 1 f_n 15", 0.0, 1, 15, 0, 1000, 4, 10, false, false, 0.0, 0.25},
      {"f_n 80 clipped", 0.0, 0, 80, 0, 1000, 4, 10, false, false, 0.0, 1.0},
      {"f_p 20 clipped", 0.5, 20, 10, 0, 1000, 4, 10, false, false, 0.25, -1.0},
  };
  int wrong = 0;
  double worst = 0.0;
  std::string first;
  for (const auto& c : cases) {
    AnnualMetrics m;
    m.net_carbon_change = c.delta_c;
    m.f_p = c.f_p;
    m.f_n = c.f_n;
    m.hwp_stored = c.hwp;
    ManagementOutcome o;
    o.ineffective_thinning = c.bad_thin;
    o.ineffective_planting = c.bad_plant;
    const RewardVector r = compute_reward(m, stand_with(c.density, c.biomass, c.soil), o);
    const double err = std::max(std::abs(r.r_carbon - c.r_carbon), std::abs(r.r_thaw - c.r_thaw));
    worst = std::max(worst, err);
    if (err > kRewardTol) {
      if (first.empty()) first = fmt::format(" (first: {} gives ({}, {}))", c.name, r.r_carbon, r.r_thaw);
      ++wrong;
    }
  }
  return {wrong == 0, fmt::format("{} of {} cases off, worst error {:.3g}{}", wrong, std::size(cases), worst, first)};
}

void group_contracts() {
  report("contracts.action_decode_table", action_table());
  report("contracts.observation_dimensions", observation_dimensions());
  report("contracts.observation_normalizations", observation_normalizations());
  report("contracts.reward_table", reward_table());
}

// ---- conservation ----

void group_conservation() {
  double worst_canopy = 0.0, worst_water = 0.0, worst_carbon = 0.0;
  int split_errors = 0, years = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EpisodeConfig cfg;
    cfg.sim.dt_minutes = 60;
    cfg.seeds = episode_seeds(EnvMode::kSiteSpecific, seed, seed, 0);
    ForestEnv env;
    env.reset(cfg);
    RngStream actions(derive_seed(seed, 99));
    while (!env.done()) {
      const AnnualMetrics m = env.step(static_cast<int>(actions.below(kActionCount))).info;
      ++years;
      worst_canopy = std::max(worst_canopy, m.max_canopy_residual);
      worst_water = std::max(worst_water, std::abs(m.water.closure_residual()) / m.water.throughput());
      worst_carbon = std::max(worst_carbon, std::abs(m.carbon.closure_residual()) / m.carbon.throughput());
      const ManagementOutcome& o = m.management;
      const bool exact = o.removed_carbon == o.hwp_stored + o.harvest_loss &&
                         m.carbon.thinning_removed == o.removed_carbon &&
                         m.carbon.hwp_stored == o.hwp_stored && m.carbon.harvest_loss == o.harvest_loss &&
                         o.hwp_stored == 0.95 * o.removed_carbon;
      split_errors += !exact;
    }
  }
  info(fmt::format("conservation: 20 seeds x 50 years at dt 60 in {:.1f} s", seconds_since(t0)));
  report("conservation.canopy_residual",
         {worst_canopy < kCanopyResidualTol,
          fmt::format("max |residual| {:.3g} W m-2 over every timestep of {} years", worst_canopy, years)});
  report("conservation.water_closure",
         {worst_water < kWaterClosureTol, fmt::format("max relative annual residual {:.3g}", worst_water)});
  report("conservation.carbon_closure",
         {worst_carbon < kCarbonClosureTol, fmt::format("max relative annual residual {:.3g}", worst_carbon)});
  report("conservation.management_split",
         {split_errors == 0, fmt::format("{} of {} years with an inexact split", split_errors, years)});
}

// ---- determinism ----

struct Trace {
  std::vector<std::vector<double>> observations;
  std::vector<std::vector<std::pair<std::string_view, double>>> metrics;
  std::vector<RewardVector> rewards;
};

Trace run_trace(const EpisodeConfig& cfg, std::uint64_t action_seed) {
  Trace t;
  ForestEnv env;
  t.observations.push_back(env.reset(cfg));
  RngStream actions(action_seed);
  while (!env.done()) {
    const StepResult r = env.step(static_cast<int>(actions.below(kActionCount)));
    t.observations.push_back(r.observation);
    t.metrics.push_back(annual_metrics_fields(r.info));
    t.rewards.push_back(r.reward);
  }
  return t;
}

bool bitwise_equal(const Trace& a, const Trace& b) {
  if (a.observations.size() != b.observations.size() || a.metrics.size() != b.metrics.size()) return false;
  for (std::size_t i = 0; i < a.observations.size(); ++i) {
    if (a.observations[i].size() != b.observations[i].size()) return false;
    for (std::size_t k = 0; k < a.observations[i].size(); ++k)
      if (!same_bits(a.observations[i][k], b.observations[i][k])) return false;
  }
  for (std::size_t i = 0; i < a.metrics.size(); ++i) {
    for (std::size_t k = 0; k < a.metrics[i].size(); ++k)
      if (!same_bits(a.metrics[i][k].second, b.metrics[i][k].second)) return false;
    if (!same_bits(a.rewards[i].r_carbon, b.rewards[i].r_carbon) ||
        !same_bits(a.rewards[i].r_thaw, b.rewards[i].r_thaw))
      return false;
  }
  return true;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "boreal");
  std::ostringstream out, err;
  const int rc = cli::run(args, out, err);
  if (err_text) *err_text = err.str();
  return rc;
}

/// Trains a tiny run through the CLI and replays every recorded episode.
std::pair<int, int> train_and_replay(const fs::path& dir, const std::string& config_text) {
  fs::create_directories(dir);
  std::ofstream(dir / "run.cfg") << config_text;
  if (run_cli({"train", (dir / "run.cfg").string(), "--out", (dir / "run").string()}) != cli::kExitOk)
    return {0, -1};
  const auto manifest = nlohmann::json::parse(slurp(dir / "run" / "manifest.json"));
  int ok = 0, total = 0;
  for (const auto& agent : manifest.at("agents"))
    for (const auto& ep : agent.at("episodes")) {
      ++total;
      ok += run_cli({"replay", (dir / "run").string(), "--episode",
                     std::to_string(ep.at("episode").get<std::uint64_t>()), "--agent",
                     std::to_string(agent.at("agent").get<std::size_t>())}) == cli::kExitOk;
    }
  return {ok, total};
}

void group_determinism() {
  const fs::path root = fs::temp_directory_path() / fmt::format("boreal_acceptance_{}", ::getpid());
  fs::remove_all(root);

  // Site-specific: fresh environments, same seeds and actions, bitwise equal.
  int identical = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    EpisodeConfig cfg;
    cfg.constants.horizon = 10;
    cfg.seeds = episode_seeds(EnvMode::kSiteSpecific, seed, seed + 100, seed);
    identical += bitwise_equal(run_trace(cfg, seed), run_trace(cfg, seed));
  }
  const std::string site_cfg =
      "train.algorithm = eupg_fixed\ntrain.timesteps = 12\ntrain.seed = 5\nenv.horizon = 3\n"
      "sim.dt_minutes = 180\neupg.hidden = 8\n";
  const auto [site_ok, site_total] = train_and_replay(root / "site_a", site_cfg);
  train_and_replay(root / "site_b", site_cfg);
  bool files_equal = true;
  for (const char* f : {"metrics.csv", "episodes.csv", "manifest.json"})
    files_equal = files_equal && slurp(root / "site_a" / "run" / f) == slurp(root / "site_b" / "run" / f) &&
                  !slurp(root / "site_a" / "run" / f).empty();
  report("determinism.site_specific_bitwise",
         {identical == 5 && files_equal && site_total > 0 && site_ok == site_total,
          fmt::format("{}/5 dt-60 episodes bitwise identical; CLI runs byte-identical: {}; {}/{} replays ok",
                      identical, files_equal ? "yes" : "no", site_ok, site_total)});

  // Generalist: episodes rebuilt from the manifest seeds match the recorded run.
  int rebuilt = 0;
  for (std::uint64_t index = 0; index < 5; ++index) {
    EpisodeConfig cfg;
    cfg.mode = EnvMode::kGeneralist;
    cfg.preference_mode = PreferenceMode::kSampled;
    cfg.constants.horizon = 5;
    cfg.sim.dt_minutes = 180;
    cfg.seeds = episode_seeds(EnvMode::kGeneralist, 42, 0, index);
    const Trace recorded = run_trace(cfg, index);
    EpisodeConfig again = cfg;
    again.seeds = EpisodeSeeds{cfg.seeds.site, cfg.seeds.weather, cfg.seeds.disturbance, cfg.seeds.preference};
    rebuilt += bitwise_equal(recorded, run_trace(again, index));
  }
  const auto [gen_ok, gen_total] = train_and_replay(
      root / "generalist",
      "train.algorithm = eupg_variable\ntrain.timesteps = 12\ntrain.seed = 9\nenv.mode = generalist\n"
      "env.horizon = 3\nsim.dt_minutes = 180\neupg.hidden = 8\n");
  report("determinism.generalist_reconstruction",
         {rebuilt == 5 && gen_total > 0 && gen_ok == gen_total,
          fmt::format("{}/5 episodes rebuilt bitwise from seeds; {}/{} CLI replays from manifest seeds ok",
                      rebuilt, gen_ok, gen_total)});
  fs::remove_all(root);
}

// ---- oracles ----

void group_oracles() {
  RngStream rng(2024);
  int pareto_wrong = 0;
  for (int set = 0; set < 100; ++set) {
    const auto pts = testing::random_point_set(rng, 200);
    const auto reference = testing::brute_force_dominated(pts);
    std::vector<ParetoPoint> expected_front;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (!reference[i]) expected_front.push_back(pts[i]);
    std::stable_sort(expected_front.begin(), expected_front.end(),
                     [](const ParetoPoint& a, const ParetoPoint& b) { return a.carbon < b.carbon; });
    const auto front = extract_pareto_front(pts);
    bool same = dominated_flags(pts) == reference && front.size() == expected_front.size();
    for (std::size_t i = 0; same && i < front.size(); ++i)
      same = front[i].carbon == expected_front[i].carbon && front[i].thaw == expected_front[i].thaw;
    pareto_wrong += !same;
  }
  report("oracles.pareto_vs_brute_force",
         {pareto_wrong == 0, fmt::format("{} of 100 sets of 200 points disagree", pareto_wrong)});

  double worst_gradient = 0.0;
  std::size_t params = 0;
  for (int n = 0; n < 50; ++n) {
    auto c = testing::random_net_case(rng);
    const auto g = testing::check_gradient(c.net, c.input, c.loss);
    worst_gradient = std::max(worst_gradient, g.worst_relative_error);
    params += g.parameters;
  }
  report("oracles.gradient_vs_finite_differences",
         {worst_gradient < kGradientTol,
          fmt::format("worst relative error {:.3g} over {} parameters of 50 nets", worst_gradient, params)});

  double worst_t = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const CanopyInputs in = testing::random_canopy_inputs(rng);
    worst_t = std::max(worst_t, std::abs(solve_canopy_temperature(in).t_can -
                                         testing::bisection_canopy_temperature(in, 1e-6)));
  }
  report("oracles.canopy_vs_bisection",
         {worst_t <= kCanopyOracleTol, fmt::format("max |dT| {:.3g} K over 10^4 inputs", worst_t)});
}

// ---- learning ----

void group_learning() {
  {
    const auto t0 = std::chrono::steady_clock::now();
    testing::PlantingPaysTask task(50);
    PpoConfig c;
    c.total_steps = 50000;
    c.seed = 1;
    const TrainResult r = train_ppo_gated(task, c);
    const double freq = testing::trailing_planting_frequency(r.curve, 2048);
    const double t = seconds_since(t0);
    report("learning.ppo_planting_pays",
           {freq >= kPlantingFrequency && t <= kLearningBudgetSeconds,
            fmt::format("planting frequency {:.3f} over the last 2048 of {} steps ({:.1f} s)", freq,
                        r.total_steps, t)});
  }
  {
    const auto t0 = std::chrono::steady_clock::now();
    int wins = 0;
    std::string detail;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      double greedy[2], trailing[2];
      for (int li = 0; li < 2; ++li) {
        EpisodeConfig base;
        base.constants.horizon = 20;
        base.sim.dt_minutes = 180;
        ForestTask task(base, seed, seed);
        EupgConfig c;
        c.total_steps = 20000;
        c.seed = seed;
        c.fixed_preference = li == 0 ? 0.0 : 1.0;
        const TrainResult r = train_eupg(task, c);
        const auto policy = make_greedy_policy(r.checkpoint);
        const auto ev = evaluate_policy(*policy, task, {c.fixed_preference}, 5, 1000000);
        greedy[li] = 0.0;
        for (const auto& e : ev.results[0].episodes) greedy[li] += e.final_density / 5.0;
        const std::size_t from = r.curve.size() > 100 ? r.curve.size() - 100 : 0;
        trailing[li] = 0.0;
        for (std::size_t i = from; i < r.curve.size(); ++i)
          trailing[li] += r.curve[i].final_density / static_cast<double>(r.curve.size() - from);
      }
      wins += greedy[1] > greedy[0];
      detail += fmt::format("{}seed {}: {:.0f} vs {:.0f}", seed ? "; " : "", seed, greedy[1], greedy[0]);
      info(fmt::format("fig2 seed {}: trailing-100 training density lambda=1 {:.1f}, lambda=0 {:.1f}", seed,
                       trailing[1], trailing[0]));
    }
    const double t = seconds_since(t0);
    report("learning.eupg_carbon_vs_thaw_density",
           {wins >= 2 && t <= kLearningBudgetSeconds,
            fmt::format("lambda=1 greedy final density exceeds lambda=0 in {}/3 seeds ({}) ({:.0f} s)", wins,
                        detail, t)});
  }
  {
    const auto t0 = std::chrono::steady_clock::now();
    testing::TwoClusterTask task;
    PpoConfig c;
    c.total_steps = 10000;
    c.seed = 1;
    CurriculumStats stats;
    std::vector<std::pair<std::uint64_t, bool>> decisions;
    train_curriculum_ppo(task, c, CurriculumConfig{}, {}, &stats, &decisions);
    std::size_t n = 0, accepted = 0, bad = 0, bad_accepted = 0;
    for (std::size_t i = decisions.size() > 200 ? decisions.size() - 200 : 0; i < decisions.size(); ++i) {
      ++n;
      accepted += decisions[i].second;
      if (task.is_bad(decisions[i].first)) {
        ++bad;
        bad_accepted += decisions[i].second;
      }
    }
    const double bad_rate = bad ? static_cast<double>(bad_accepted) / static_cast<double>(bad) : 1.0;
    const double t = seconds_since(t0);
    info(fmt::format("curriculum: overall acceptance {:.3f} over the last {} decisions, threshold {:.3f}",
                     n ? static_cast<double>(accepted) / static_cast<double>(n) : 0.0, n, stats.threshold));
    report("learning.curriculum_excludes_bad_cluster",
           {bad > 0 && bad_rate <= kBadClusterAcceptance && t <= kLearningBudgetSeconds,
            fmt::format("bad-cluster acceptance {:.3f} over {} bad sites in the last {} decisions ({:.1f} s)",
                        bad_rate, bad, n, t)});
  }
}

// ---- performance ----

void group_performance() {
  std::vector<double> times;
  for (int rep = 0; rep < 3; ++rep) {
    EpisodeConfig cfg;
    cfg.sim.dt_minutes = 60;
    cfg.seeds = episode_seeds(EnvMode::kSiteSpecific, 3, 3, static_cast<std::uint64_t>(rep));
    const auto t0 = std::chrono::steady_clock::now();
    ForestEnv env;
    env.reset(cfg);
    while (!env.done()) env.step(kNoOpAction);
    times.push_back(seconds_since(t0));
  }
  std::sort(times.begin(), times.end());
  report("performance.episode_50y_dt60",
         {times[1] <= kEpisodeBudgetSeconds,
          fmt::format("median {:.3f} s (min {:.3f}, max {:.3f}) for 50 years x 8760 steps", times[1],
                      times[0], times[2])});
}

// ---- metrics ----

void group_metrics() {
  const double synthetic = lambda_monotonicity_violations(std::vector<double>{0.0, 1.0, 0.5, 2.0});
  report("metrics.monotonicity_synthetic",
         {synthetic == 1.0 / 3.0, fmt::format("[0, 1, 0.5, 2] gives {:.17g}", synthetic)});
  std::vector<double> monotone;
  for (int k = 0; k < 11; ++k) monotone.push_back(0.1 * k * k - 3.0);
  const double m = lambda_monotonicity_violations(monotone);
  report("metrics.monotonicity_monotone", {m == 0.0, fmt::format("strictly increasing policy gives {}", m)});
}

}  // namespace
}  // namespace boreal::acceptance

int main(int argc, char** argv) {
  using namespace boreal::acceptance;
  const std::vector<std::pair<std::string, std::function<void()>>> groups{
      {"contracts", group_contracts},     {"conservation", group_conservation},
      {"determinism", group_determinism}, {"oracles", group_oracles},
      {"learning", group_learning},       {"performance", group_performance},
      {"metrics", group_metrics}};

  CLI::App app{"Acceptance checks; one PASS/FAIL line per criterion"};
  std::vector<std::string> only;
  app.add_option("--only", only, "run only these groups")
      ->check(CLI::IsMember({"contracts", "conservation", "determinism", "oracles", "learning",
                             "performance", "metrics"}));
  CLI11_PARSE(app, argc, argv);

  for (const auto& [name, run] : groups) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    try {
      run();
    } catch (const std::exception& e) {
      report(name, {false, std::string("exception: ") + e.what()});
    }
  }
  std::cout << (failures == 0 ? "ALL PASS" : fmt::format("{} FAILED", failures)) << std::endl;
  return failures == 0 ? 0 : 1;
}
