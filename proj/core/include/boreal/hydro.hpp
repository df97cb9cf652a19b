#pragma once

#include "boreal/params.hpp"
#include "boreal/stand.hpp"
#include "boreal/weather.hpp"

namespace boreal {

/// Snow and soil water stores (mm) with annual ledgers.
struct WaterState {
  double swe_ground = 0.0;
  double swe_canopy = 0.0;
  double swc = 0.0;
  double precip_total = 0.0;
  double et_total = 0.0;
  double runoff_total = 0.0;
  double melt_total = 0.0;

  double storage() const { return swe_ground + swe_canopy + swc; }
  /// Zeroes the ledgers, keeping the stores.
  void reset_ledgers() { precip_total = et_total = runoff_total = melt_total = 0.0; }

  friend bool operator==(const WaterState&, const WaterState&) = default;
};

struct HydroOptions {
  /// Rain falling on a snowpack refreezes into it instead of reaching the soil.
  bool rain_on_snow_refreezes = true;
};

/// Intercepts snow up to the canopy cap; the rest reaches the ground.
WaterState partition_precipitation(const Forcing& forcing, const PhysicalParams& params,
                                   const WaterState& w, const HydroOptions& opt = {});

struct MeltEtResult {
  WaterState water;
  double et = 0.0;  // mm actually removed this step
};

/// Converts melt energy (W m-2) into melt water routed to the soil, removes
/// evapotranspiration, and spills soil water above capacity as runoff.
MeltEtResult apply_melt_and_et(const WaterState& w, double melt_can_energy,
                               double melt_snow_energy, double le_can, double le_soil,
                               double dt_seconds, const SiteParameters& p);

}  // namespace boreal
