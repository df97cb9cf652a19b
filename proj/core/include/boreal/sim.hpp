#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "boreal/carbon.hpp"
#include "boreal/disturb.hpp"
#include "boreal/energy.hpp"
#include "boreal/hydro.hpp"
#include "boreal/params.hpp"
#include "boreal/rng.hpp"
#include "boreal/stand.hpp"
#include "boreal/weather.hpp"

namespace boreal {

/// A decoded management action.
struct ActionPair {
  double density_change = 0.0;   // stems/ha, one of {-100, -50, 0, 50, 100}
  double conifer_target = 0.5;   // one of {0, 0.25, 0.5, 0.75, 1}

  friend bool operator==(const ActionPair&, const ActionPair&) = default;
};

struct WaterLedger {
  double precip = 0.0;
  double et = 0.0;
  double runoff = 0.0;
  double melt = 0.0;
  double storage_start = 0.0;
  double storage_end = 0.0;

  /// precip - (delta storage + et + runoff)
  double closure_residual() const { return precip - (storage_end - storage_start + et + runoff); }
  double throughput() const { return precip + et + runoff + storage_start + storage_end; }
};

/// One simulated year.
struct AnnualMetrics {
  int year = 0;                          // stand year before the step
  double net_carbon_change = 0.0;        // kgC m-2 yr-1, incl. HWP stored this year
  double f_p = 0.0;                      // warming degree-day equivalents
  double f_n = 0.0;                      // cooling degree-day equivalents
  double biomass_carbon = 0.0;           // year end
  double soil_carbon = 0.0;
  double hwp_stored = 0.0;
  double harvest_loss = 0.0;
  double density = 0.0;                  // year end, stems/ha
  double conifer_fraction = 0.0;
  double drought_index_peak = 0.0;
  double drought_index_end = 0.0;
  double mean_winter_temp = 0.0;         // deg C
  double max_canopy_residual = 0.0;      // W m-2
  std::size_t timesteps = 0;
  CarbonLedger carbon;
  WaterLedger water;
  DisturbanceReport disturbance;
  DemographyReport demography;
  ManagementOutcome management;
};

struct SimConfig {
  int dt_minutes = 60;
  bool temperature_noise = true;
  double joules_per_degree_day = 1.5e7;
  double drought_winter_carryover = 0.5;  // fraction of the index kept into the next year
  ManagementRules management;
  WeatherModel weather;
  DisturbanceModel disturbance;
  DemographyOptions demography;
  HydroOptions hydro;
  bool fire = true;
  bool insects = true;
};

/// Checks that `dt_minutes` divides a day into a whole number of steps.
void validate_sim_config(const SimConfig& cfg);

/// Optional per-phase trace hook; receives "management", "parameters",
/// "physics", "demography", "metrics" in timeline order.
using TraceHook = std::function<void(std::string_view phase, int year)>;

/// Physical state carried from year to year for one episode.
class ForestSimulator {
 public:
  ForestSimulator(const SiteParameters& p, const StandState& initial, std::uint64_t weather_seed,
                  std::uint64_t disturbance_seed, SimConfig cfg = {});

  /// Runs management, the sub-daily physics for 365 days, disturbance and
  /// demography, and returns the year's metrics. PhysicsFault carries the
  /// year, day and step.
  AnnualMetrics simulate_year(const ActionPair& action);

  /// One physics-only year that warms up temperatures and water without
  /// touching the stand, pools, or disturbance stream.
  void spin_up();

  const StandState& stand() const { return stand_; }
  const SiteParameters& params() const { return params_; }
  const NodeTemperatures& temperatures() const { return temps_; }
  const WaterState& water() const { return water_; }
  double drought_index() const { return drought_; }
  const SimConfig& config() const { return cfg_; }
  const RngStream& weather_rng() const { return weather_rng_; }
  const RngStream& disturbance_rng() const { return disturb_rng_; }
  void set_trace(TraceHook hook) { trace_ = std::move(hook); }

 private:
  struct PhysicsTotals;
  void initialize_temperatures(const AnnualWeather& weather);
  PhysicsTotals run_physics(const AnnualWeather& weather, StandState& stand, bool disturbances,
                            int year);

  SiteParameters params_;
  StandState stand_;
  SimConfig cfg_;
  RngStream weather_rng_;
  RngStream disturb_rng_;
  NodeTemperatures temps_;
  WaterState water_;
  double drought_ = 0.0;
  bool temps_initialized_ = false;
  TraceHook trace_;
};

/// Initial stand: 1000 stems/ha, half conifer, 40% young, 40% mature and the
/// rest split across seedling, sapling and old; biomass 4 and soil 10 kgC m-2.
StandState default_initial_stand();

/// The annual record as named scalars (flags as 0/1), in CSV column order.
std::vector<std::pair<std::string_view, double>> annual_metrics_fields(const AnnualMetrics& m);

/// CSV serialization of the annual record; one header, one row per year.
std::string annual_metrics_csv_header();
void write_annual_metrics_csv_row(std::ostream& out, const AnnualMetrics& m);

}  // namespace boreal
