#pragma once

#include <utility>

#include "boreal/stand.hpp"

namespace boreal {

inline constexpr double kSecondsPerYear = 365.0 * 86400.0;
inline constexpr double kBiomassReferencePool = 10.0;  // kgC m-2
inline constexpr double kSoilReferencePool = 20.0;     // kgC m-2

struct DisturbanceReport;

/// Annual carbon fluxes, kgC m-2 yr-1, all non-negative.
struct CarbonLedger {
  double gpp_annual = 0.0;
  double resp_auto_annual = 0.0;
  double resp_het_annual = 0.0;
  double litterfall_annual = 0.0;
  double natural_mortality = 0.0;   // to soil
  double insect_to_soil = 0.0;
  double fire_to_soil = 0.0;        // uncombusted deadwood
  double fire_emissions = 0.0;
  double thinning_removed = 0.0;
  double hwp_stored = 0.0;
  double harvest_loss = 0.0;
  double floor_deficit = 0.0;       // carbon created by flooring a pool at zero

  // Pools: before management, at the start of the physics loop, and at year end.
  double biomass_before = 0.0;
  double soil_before = 0.0;
  double biomass_start = 0.0;
  double soil_start = 0.0;
  double biomass_end = 0.0;
  double soil_end = 0.0;

  double mortality_to_soil() const { return natural_mortality + insect_to_soil + fire_to_soil; }
  double delta_biomass() const { return biomass_end - biomass_before; }
  double delta_soil() const { return soil_end - soil_before; }
  /// Net ecosystem change including harvested-wood storage; the reward quantity.
  double net_carbon_change() const { return delta_biomass() + delta_soil() + hwp_stored; }
  /// Zero when every kgC is accounted for.
  double closure_residual() const;
  /// Sum of flux magnitudes, the scale for relative closure checks.
  double throughput() const;
};

/// Gross primary production over one timestep, gC m-2.
/// `par_abs` W m-2, `lue` gC MJ-1.
double gpp_timestep(double par_abs, double lue, double f_vpd, double f_swc, double dt_seconds);

/// Q10 respiration over one timestep, kgC m-2. The annual base rate applies at
/// `pool == reference_pool` and `t == t_ref`.
double respiration_timestep(double pool, double r_base, double q10, double t, double t_ref,
                            double reference_pool, double dt_seconds);

/// Applies the annual integrals to the pools of `s` (post-management pools at
/// the start of the year) and returns the stand with year-end pools.
std::pair<StandState, CarbonLedger> end_of_year_pools(const StandState& s, CarbonLedger ledger,
                                                      const DemographyReport& demography,
                                                      const DisturbanceReport& disturbance);

}  // namespace boreal
