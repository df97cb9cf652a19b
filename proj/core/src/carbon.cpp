#include "boreal/carbon.hpp"

#include <cmath>

#include "boreal/disturb.hpp"
#include "boreal/errors.hpp"

namespace boreal {

double CarbonLedger::closure_residual() const {
  const double npp_net = gpp_annual - resp_auto_annual - resp_het_annual;
  return delta_biomass() + delta_soil() + fire_emissions + hwp_stored + harvest_loss - npp_net -
         floor_deficit;
}

double CarbonLedger::throughput() const {
  return gpp_annual + resp_auto_annual + resp_het_annual + litterfall_annual +
         mortality_to_soil() + fire_emissions + thinning_removed + floor_deficit +
         std::abs(biomass_before) + std::abs(soil_before);
}

double gpp_timestep(double par_abs, double lue, double f_vpd, double f_swc, double dt) {
  require(par_abs >= 0.0, "gpp_timestep: negative absorbed PAR");
  require(f_vpd >= 0.0 && f_vpd <= 1.0 && f_swc >= 0.0 && f_swc <= 1.0,
          "gpp_timestep: stress factor outside [0, 1]");
  // W m-2 * s = J m-2; / 1e6 -> MJ m-2; * gC MJ-1.
  return par_abs * dt * 1e-6 * lue * f_vpd * f_swc;
}

double respiration_timestep(double pool, double r_base, double q10, double t, double t_ref,
                            double reference_pool, double dt) {
  require(pool >= 0.0, "respiration_timestep: negative pool");
  return r_base * (pool / reference_pool) * std::pow(q10, (t - t_ref) / 10.0) * dt /
         kSecondsPerYear;
}

std::pair<StandState, CarbonLedger> end_of_year_pools(const StandState& s, CarbonLedger ledger,
                                                      const DemographyReport& demography,
                                                      const DisturbanceReport& disturbance) {
  ledger.natural_mortality = demography.mortality_carbon;
  ledger.insect_to_soil = disturbance.insect_carbon_to_soil;
  ledger.fire_to_soil = disturbance.fire_carbon_to_soil;
  ledger.fire_emissions = disturbance.fire_carbon_combusted;
  ledger.biomass_start = s.biomass_carbon;
  ledger.soil_start = s.soil_carbon;

  double biomass = s.biomass_carbon + ledger.gpp_annual - ledger.resp_auto_annual -
                   ledger.litterfall_annual - ledger.fire_emissions - ledger.mortality_to_soil();
  double soil = s.soil_carbon + ledger.litterfall_annual + ledger.mortality_to_soil() -
                ledger.resp_het_annual;
  ledger.floor_deficit = 0.0;
  if (biomass < 0.0) {
    ledger.floor_deficit -= biomass;
    biomass = 0.0;
  }
  if (soil < 0.0) {
    ledger.floor_deficit -= soil;
    soil = 0.0;
  }
  StandState out = s;
  out.biomass_carbon = biomass;
  out.soil_carbon = soil;
  ledger.biomass_end = biomass;
  ledger.soil_end = soil;
  return {out, ledger};
}

}  // namespace boreal
