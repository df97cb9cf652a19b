#pragma once

#include <utility>

#include "boreal/params.hpp"
#include "boreal/rng.hpp"
#include "boreal/stand.hpp"

namespace boreal {

struct DisturbanceReport {
  bool fire_occurred = false;
  double fire_probability = 0.0;        // of the ignition day, or the last eligible day
  double fire_mortality_fraction = 0.0;
  double fire_carbon_combusted = 0.0;   // kgC m-2, to atmosphere
  double fire_carbon_to_soil = 0.0;     // kgC m-2, deadwood
  bool insect_occurred = false;
  double insect_probability = 0.0;
  double insect_mortality_fraction = 0.0;
  double insect_carbon_to_soil = 0.0;   // kgC m-2
};

struct DisturbanceModel {
  double hot_day_threshold = 20.0;      // deg C daily mean
  double conifer_flammability = 1.0;    // probability multiplier is 1 + w * conifer fraction
  double fire_mortality_min = 0.2;
  double fire_mortality_max = 0.6;
  double fire_combusted_fraction = 0.7;
  double insect_winter_sensitivity = 0.1;  // per deg C
  double insect_winter_reference = -15.0;  // deg C
  double insect_density_reference = 1000.0;
  double insect_conifer_bias = 4.0;        // conifer : deciduous mortality
};

/// Daily ignition probability; zero unless the drought index and the daily mean
/// temperature both reach their thresholds.
double fire_probability(const StandState& s, const SiteParameters& p, double drought_index,
                        double mean_temp_c, const DisturbanceModel& m = {});

/// One daily fire check. Always consumes two draws. When `allow_ignition` is
/// false (a fire already burned this year) the draws are still taken. On
/// ignition the stems die by a uniform fraction and the carbon split is
/// reported relative to `s.biomass_carbon`; pools are left to the carbon model.
std::pair<StandState, DisturbanceReport> fire_check(const StandState& s, const SiteParameters& p,
                                                    double drought_index, double mean_temp_c,
                                                    RngStream& rng, bool allow_ignition = true,
                                                    const DisturbanceModel& m = {});

double insect_probability(const StandState& s, const SiteParameters& p, double mean_winter_temp_c,
                          const DisturbanceModel& m = {});

/// Annual outbreak check. Always consumes two draws.
std::pair<StandState, DisturbanceReport> insect_check(const StandState& s, const SiteParameters& p,
                                                      double mean_winter_temp_c, RngStream& rng,
                                                      const DisturbanceModel& m = {});

}  // namespace boreal
