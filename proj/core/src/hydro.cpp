#include "boreal/hydro.hpp"

#include <algorithm>

#include "boreal/energy.hpp"
#include "boreal/errors.hpp"

namespace boreal {

WaterState partition_precipitation(const Forcing& forcing, const PhysicalParams& params,
                                   const WaterState& w, const HydroOptions& opt) {
  require(forcing.precip_rate >= 0.0, "partition_precipitation: negative precipitation");
  WaterState out = w;
  const double precip = forcing.precip_rate;
  if (precip <= 0.0) return out;
  out.precip_total += precip;
  if (forcing.precip_is_snow) {
    const double room = std::max(0.0, params.canopy_snow_capacity - w.swe_canopy);
    const double intercepted = std::min(precip * params.interception_efficiency, room);
    out.swe_canopy += intercepted;
    out.swe_ground += precip - intercepted;
  } else if (w.swe_ground > 0.0 && opt.rain_on_snow_refreezes) {
    out.swe_ground += precip;
  } else {
    out.swc += precip;
  }
  return out;
}

MeltEtResult apply_melt_and_et(const WaterState& w, double melt_can_energy,
                               double melt_snow_energy, double le_can, double le_soil,
                               double dt, const SiteParameters& p) {
  require(melt_can_energy >= 0.0 && melt_snow_energy >= 0.0,
          "apply_melt_and_et: negative melt energy");
  MeltEtResult r;
  WaterState& out = r.water;
  out = w;

  const double melt_can = std::min(out.swe_canopy, melt_can_energy * dt / kLatentHeatFusion);
  out.swe_canopy -= melt_can;
  const double melt_ground = std::min(out.swe_ground, melt_snow_energy * dt / kLatentHeatFusion);
  out.swe_ground -= melt_ground;
  out.swc += melt_can + melt_ground;
  out.melt_total += melt_can + melt_ground;

  const double demand = std::max(0.0, le_can + le_soil) * dt / kLatentHeatVaporization;
  r.et = std::min(demand, out.swc);
  out.swc -= r.et;
  out.et_total += r.et;

  const double runoff = std::max(0.0, out.swc - p.max_water_content);
  out.swc -= runoff;
  out.runoff_total += runoff;
  return r;
}

}  // namespace boreal
