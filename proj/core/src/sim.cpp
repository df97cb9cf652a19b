#include "boreal/sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "boreal/errors.hpp"

namespace boreal {

namespace {

constexpr double kGramsPerKilogram = 1000.0;

bool is_winter_day(int doy) { return doy <= 59 || doy >= 335; }

}  // namespace

void validate_sim_config(const SimConfig& cfg) {
  if (cfg.dt_minutes <= 0 || 1440 % cfg.dt_minutes != 0)
    throw ConfigError(fmt::format("dt_minutes = {} does not divide a day evenly", cfg.dt_minutes));
  if (!(cfg.joules_per_degree_day > 0.0))
    throw ConfigError("joules_per_degree_day must be positive");
  if (!(cfg.drought_winter_carryover >= 0.0 && cfg.drought_winter_carryover <= 1.0))
    throw ConfigError("drought_winter_carryover must lie in [0, 1]");
}

StandState default_initial_stand() {
  StandState s;
  const double total = 1000.0;
  const std::array<double, kAgeClassCount> share{0.2 / 3.0, 0.2 / 3.0, 0.4, 0.4, 0.2 / 3.0};
  for (std::size_t k = 0; k < kAgeClassCount; ++k) {
    s.age.stems[0][k] = 0.5 * total * share[k];
    s.age.stems[1][k] = 0.5 * total * share[k];
  }
  s.biomass_carbon = 4.0;
  s.soil_carbon = 10.0;
  return s;
}

struct ForestSimulator::PhysicsTotals {
  double gpp = 0.0;   // kgC m-2
  double ra = 0.0;
  double rh = 0.0;
  BoundaryFluxAccumulator boundary;
  double max_residual = 0.0;
  double drought_peak = 0.0;
  double winter_temp = 0.0;
  std::size_t timesteps = 0;
  DisturbanceReport fire;
};

ForestSimulator::ForestSimulator(const SiteParameters& p, const StandState& initial,
                                 std::uint64_t weather_seed, std::uint64_t disturbance_seed,
                                 SimConfig cfg)
    : params_(p),
      stand_(initial),
      cfg_(std::move(cfg)),
      weather_rng_(weather_seed),
      disturb_rng_(disturbance_seed) {
  validate_sim_config(cfg_);
  if (auto problem = validate_site_parameters(p)) throw ConfigError("site parameters: " + *problem);
  water_.swc = 0.5 * p.max_water_content;
}

void ForestSimulator::initialize_temperatures(const AnnualWeather& weather) {
  const double t0 = weather[0].mean_temp + kFreezingK;
  temps_ = NodeTemperatures{t0, t0, std::min(t0, kFreezingK), t0, params_.deep_boundary_temp + 1.0};
  temps_initialized_ = true;
}

ForestSimulator::PhysicsTotals ForestSimulator::run_physics(const AnnualWeather& weather,
                                                            StandState& stand, bool disturbances,
                                                            int year) {
  PhysicsTotals t;
  const int steps_per_day = 1440 / cfg_.dt_minutes;
  const double dt = cfg_.dt_minutes * 60.0;
  const double dt_hours = cfg_.dt_minutes / 60.0;
  const double biomass = stand.biomass_carbon;
  const double soil = stand.soil_carbon;
  const double j_per_gc = params_.energy_per_gram_carbon;
  double winter_sum = 0.0;
  int winter_days = 0;
  PhysicalParams phys = derive_physical_params(stand, params_, phenology_factor(params_, 1.0));

  for (const DailyWeather& day : weather) {
    if (is_winter_day(day.day_of_year)) {
      winter_sum += day.mean_temp;
      ++winter_days;
    }
    phys = derive_physical_params(stand, params_, phenology_factor(params_, day.day_of_year));
    drought_ = update_drought_index(drought_, day);
    t.drought_peak = std::max(t.drought_peak, drought_);

    for (int i = 0; i < steps_per_day; ++i) {
      const double hour = (i + 0.5) * dt_hours;
      const Forcing f = forcing_at(day, params_, hour, dt_hours, cfg_.weather);
      water_ = partition_precipitation(f, phys, water_, cfg_.hydro);

      const StressFactors stress = stress_factors(f.vpd, water_.swc, params_);
      const double par_abs = f.shortwave_down * params_.par_fraction * phys.par_absorption;
      const double gpp_g = gpp_timestep(par_abs, phys.lue_effective, stress.f_vpd, stress.f_swc, dt);
      const double g_photo = gpp_g * j_per_gc / dt;

      EnergyFluxes fx;
      try {
        temps_ = step_energy(temps_, fx, phys, f,
                             {water_.swe_ground, water_.swe_canopy, water_.swc}, params_, g_photo, dt);
      } catch (const PhysicsFault& e) {
        throw PhysicsFault(fmt::format("year {} day {} step {}: {}", year, day.day_of_year, i, e.what()));
      }
      t.boundary = accumulate_boundary_flux(t.boundary, fx.cond_deep_boundary, dt,
                                            cfg_.joules_per_degree_day);
      water_ = apply_melt_and_et(water_, fx.melt_can, fx.melt_snow, fx.le_can, fx.le_soil, dt, params_)
                   .water;

      t.gpp += gpp_g / kGramsPerKilogram;
      t.ra += respiration_timestep(biomass, params_.base_respiration, params_.q10_factor,
                                   temps_.t_can, params_.respiration_reference_temp,
                                   kBiomassReferencePool, dt);
      t.rh += respiration_timestep(soil, params_.soil_respiration, params_.q10_factor,
                                   temps_.t_soil_surf, params_.respiration_reference_temp,
                                   kSoilReferencePool, dt);
      t.max_residual = std::max(t.max_residual, std::abs(fx.canopy_residual));
      ++t.timesteps;
    }

    if (disturbances && cfg_.fire) {
      auto [after, report] = fire_check(stand, params_, drought_, day.mean_temp, disturb_rng_,
                                        !t.fire.fire_occurred, cfg_.disturbance);
      if (report.fire_occurred) {
        stand = after;
        t.fire = report;
      } else if (!t.fire.fire_occurred) {
        t.fire.fire_probability = std::max(t.fire.fire_probability, report.fire_probability);
      }
    }
  }
  t.winter_temp = winter_days > 0 ? winter_sum / winter_days : 0.0;
  return t;
}

AnnualMetrics ForestSimulator::simulate_year(const ActionPair& action) {
  AnnualMetrics m;
  m.year = stand_.year;
  const double biomass_before = stand_.biomass_carbon;
  const double soil_before = stand_.soil_carbon;

  if (trace_) trace_("management", m.year);
  auto [managed, outcome] =
      apply_management(stand_, action.density_change, action.conifer_target, cfg_.management);
  m.management = outcome;

  if (trace_) trace_("parameters", m.year);
  const AnnualWeather weather = generate_annual_weather(params_, weather_rng_,
                                                        cfg_.temperature_noise, cfg_.weather);
  if (!temps_initialized_) initialize_temperatures(weather);
  water_.reset_ledgers();
  m.water.storage_start = water_.storage();

  if (trace_) trace_("physics", m.year);
  StandState during = managed;
  PhysicsTotals t = run_physics(weather, during, true, m.year);

  if (trace_) trace_("demography", m.year);
  CarbonLedger ledger;
  ledger.biomass_before = biomass_before;
  ledger.soil_before = soil_before;
  ledger.gpp_annual = t.gpp;
  ledger.resp_auto_annual = t.ra;
  ledger.resp_het_annual = t.rh;
  ledger.litterfall_annual = params_.litterfall_fraction * managed.biomass_carbon;
  ledger.thinning_removed = outcome.removed_carbon;
  ledger.hwp_stored = outcome.hwp_stored;
  ledger.harvest_loss = outcome.harvest_loss;

  // Disturbance and mortality shares apply to the provisional end-of-year biomass.
  DisturbanceReport dist = t.fire;
  double provisional = managed.biomass_carbon + t.gpp - t.ra - ledger.litterfall_annual -
                       dist.fire_carbon_combusted - dist.fire_carbon_to_soil;
  StandState probe = during;
  probe.biomass_carbon = std::max(0.0, provisional);
  if (cfg_.insects) {
    auto [after, insect] = insect_check(probe, params_, t.winter_temp, disturb_rng_, cfg_.disturbance);
    probe = after;
    dist.insect_occurred = insect.insect_occurred;
    dist.insect_probability = insect.insect_probability;
    dist.insect_mortality_fraction = insect.insect_mortality_fraction;
    dist.insect_carbon_to_soil = insect.insect_carbon_to_soil;
  }
  provisional -= dist.insect_carbon_to_soil;
  probe.biomass_carbon = std::max(0.0, provisional);
  auto [aged, demography] = end_of_year_demography(probe, params_, disturb_rng_, cfg_.demography);
  aged.biomass_carbon = managed.biomass_carbon;
  aged.soil_carbon = managed.soil_carbon;
  auto [final_stand, final_ledger] = end_of_year_pools(aged, ledger, demography, dist);
  final_stand.year = stand_.year + 1;
  stand_ = final_stand;

  if (trace_) trace_("metrics", m.year);
  drought_ *= cfg_.drought_winter_carryover;

  m.carbon = final_ledger;
  m.net_carbon_change = final_ledger.net_carbon_change();
  m.f_p = t.boundary.f_p;
  m.f_n = t.boundary.f_n;
  m.biomass_carbon = stand_.biomass_carbon;
  m.soil_carbon = stand_.soil_carbon;
  m.hwp_stored = outcome.hwp_stored;
  m.harvest_loss = outcome.harvest_loss;
  m.density = stand_.age.total();
  m.conifer_fraction = stand_.age.conifer_fraction();
  m.drought_index_peak = t.drought_peak;
  m.drought_index_end = drought_;
  m.mean_winter_temp = t.winter_temp;
  m.max_canopy_residual = t.max_residual;
  m.timesteps = t.timesteps;
  m.disturbance = dist;
  m.demography = demography;
  m.water.precip = water_.precip_total;
  m.water.et = water_.et_total;
  m.water.runoff = water_.runoff_total;
  m.water.melt = water_.melt_total;
  m.water.storage_end = water_.storage();
  return m;
}

void ForestSimulator::spin_up() {
  const AnnualWeather weather = generate_annual_weather(params_, weather_rng_,
                                                        cfg_.temperature_noise, cfg_.weather);
  if (!temps_initialized_) initialize_temperatures(weather);
  StandState copy = stand_;
  run_physics(weather, copy, false, stand_.year);
  water_.reset_ledgers();
  drought_ *= cfg_.drought_winter_carryover;
}

std::vector<std::pair<std::string_view, double>> annual_metrics_fields(const AnnualMetrics& m) {
  const CarbonLedger& c = m.carbon;
  auto flag = [](bool b) { return b ? 1.0 : 0.0; };
  return {{"year", m.year},
          {"net_carbon_change", m.net_carbon_change},
          {"f_p", m.f_p},
          {"f_n", m.f_n},
          {"biomass_carbon", m.biomass_carbon},
          {"soil_carbon", m.soil_carbon},
          {"hwp_stored", m.hwp_stored},
          {"harvest_loss", m.harvest_loss},
          {"density", m.density},
          {"conifer_fraction", m.conifer_fraction},
          {"gpp", c.gpp_annual},
          {"resp_auto", c.resp_auto_annual},
          {"resp_het", c.resp_het_annual},
          {"litterfall", c.litterfall_annual},
          {"mortality_to_soil", c.mortality_to_soil()},
          {"fire_emissions", c.fire_emissions},
          {"floor_deficit", c.floor_deficit},
          {"carbon_closure_residual", c.closure_residual()},
          {"precip", m.water.precip},
          {"et", m.water.et},
          {"runoff", m.water.runoff},
          {"melt", m.water.melt},
          {"water_storage_start", m.water.storage_start},
          {"water_storage_end", m.water.storage_end},
          {"water_closure_residual", m.water.closure_residual()},
          {"fire_occurred", flag(m.disturbance.fire_occurred)},
          {"fire_mortality_fraction", m.disturbance.fire_mortality_fraction},
          {"insect_occurred", flag(m.disturbance.insect_occurred)},
          {"insect_mortality_fraction", m.disturbance.insect_mortality_fraction},
          {"drought_index_peak", m.drought_index_peak},
          {"mean_winter_temp", m.mean_winter_temp},
          {"stems_died", m.demography.stems_died},
          {"stems_recruited", m.demography.stems_recruited},
          {"stems_removed", m.management.stems_removed},
          {"stems_planted", m.management.stems_planted},
          {"ineffective_thinning", flag(m.management.ineffective_thinning)},
          {"ineffective_planting", flag(m.management.ineffective_planting)},
          {"max_canopy_residual", m.max_canopy_residual}};
}

std::string annual_metrics_csv_header() {
  std::string h;
  for (const auto& [name, _] : annual_metrics_fields(AnnualMetrics{})) {
    if (!h.empty()) h += ',';
    h += name;
  }
  return h;
}

void write_annual_metrics_csv_row(std::ostream& out, const AnnualMetrics& m) {
  std::string row;
  for (const auto& [_, v] : annual_metrics_fields(m)) {
    if (!row.empty()) row += ',';
    row += fmt::format("{:.17g}", v);
  }
  out << row << '\n';
}

}  // namespace boreal
