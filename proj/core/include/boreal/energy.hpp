#pragma once

#include <string>

#include "boreal/params.hpp"
#include "boreal/stand.hpp"
#include "boreal/weather.hpp"

namespace boreal {

inline constexpr double kLatentHeatFusion = 3.34e5;       // J kg-1
inline constexpr double kLatentHeatVaporization = 2.50e6; // J kg-1
inline constexpr double kIceHeatCapacity = 2100.0;        // J kg-1 K-1
inline constexpr double kMinNodeTemp = 180.0;             // K
inline constexpr double kMaxNodeTemp = 340.0;             // K

struct NodeTemperatures {
  double t_can = kFreezingK;
  double t_trunk = kFreezingK;
  double t_snow = kFreezingK;
  double t_soil_surf = kFreezingK;
  double t_soil_deep = kFreezingK;

  friend bool operator==(const NodeTemperatures&, const NodeTemperatures&) = default;
};

/// Per-timestep flux decomposition, W m-2.
struct EnergyFluxes {
  double r_net_can = 0.0;
  double h_can = 0.0;
  double le_can = 0.0;
  double g_photo = 0.0;
  double melt_can = 0.0;
  double cond_can_trunk = 0.0;   // canopy -> trunk
  double r_net_snow = 0.0;
  double h_snow = 0.0;
  double melt_snow = 0.0;
  double r_net_soil = 0.0;
  double h_soil = 0.0;
  double le_soil = 0.0;
  double cond_surf_deep = 0.0;   // surface soil -> deep soil
  double cond_deep_boundary = 0.0; // deep soil -> permafrost boundary (positive warms it)
  double canopy_residual = 0.0;
};

/// Annual integrals of the boundary flux in degree-day equivalents.
/// Both integrals are non-negative magnitudes.
struct BoundaryFluxAccumulator {
  double f_p = 0.0;  // warming
  double f_n = 0.0;  // cooling
};

/// Everything the canopy balance depends on, frozen for one timestep.
struct CanopyInputs {
  double air_temp = kFreezingK;
  double shortwave_down = 0.0;
  double longwave_down = 0.0;
  double ground_temp = kFreezingK;  // emits L_up toward the canopy
  double trunk_temp = kFreezingK;
  double radiative_cover = 0.0;
  double albedo = 0.1;
  double emissivity = 0.97;
  double h_can = 20.0;
  double canopy_trunk_conductance = 0.0;
  double le_coefficient = 0.0;      // alpha_PT * D/(D+gamma) * f_VPD * f_SWC
  double le_cap = 0.0;              // W m-2 of latent heat the soil water can supply
  double g_photo = 0.0;             // W m-2
  double melt_capacity = 0.0;       // W m-2 that would melt all canopy snow this step
};

struct CanopySolution {
  double t_can = kFreezingK;
  double r_net = 0.0;
  double h = 0.0;
  double le = 0.0;
  double g_photo = 0.0;
  double melt = 0.0;
  double cond_trunk = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool used_bisection = false;
};

/// Terms of the canopy balance at temperature `t` without the melt sink.
struct CanopyTerms {
  double r_net, h, le, cond_trunk, net;
};
CanopyTerms canopy_terms(const CanopyInputs& in, double t);

/// Solves R_net - H - LE - G_photo - melt - conduction = 0 for the canopy
/// temperature with safeguarded Newton iterations, falling back to bisection.
/// With canopy snow present the temperature pins at freezing while melt absorbs
/// the surplus. Throws PhysicsFault if no bracket exists.
CanopySolution solve_canopy_temperature(const CanopyInputs& in);

std::string describe(const CanopyInputs& in);

/// Water-side inputs to the energy step.
struct EnergyWaterState {
  double swe_ground = 0.0;  // mm
  double swe_canopy = 0.0;  // mm
  double swc = 0.0;         // mm
};

struct StressFactors {
  double f_vpd = 1.0;
  double f_swc = 1.0;
};
StressFactors stress_factors(double vpd, double swc, const SiteParameters& p);

/// Effective soil conductivity; wetter soils conduct better.
double effective_soil_conductivity(double swc, const SiteParameters& p);

/// One timestep of the five-node model. Solves the canopy, then advances the
/// trunk, snow, surface and deep soil nodes by forward Euler. `g_photo` is the
/// photosynthetic energy sink (W m-2) supplied by the carbon model.
NodeTemperatures step_energy(const NodeTemperatures& temps, EnergyFluxes& fluxes_out,
                             const PhysicalParams& stand, const Forcing& forcing,
                             const EnergyWaterState& water, const SiteParameters& p,
                             double g_photo, double dt_seconds);

/// Adds one timestep of boundary flux; `joules_per_degree_day` converts J m-2
/// into the reward's degree-day units.
BoundaryFluxAccumulator accumulate_boundary_flux(BoundaryFluxAccumulator acc,
                                                 double cond_deep_boundary, double dt_seconds,
                                                 double joules_per_degree_day);

}  // namespace boreal
