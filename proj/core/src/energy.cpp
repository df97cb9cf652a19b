#include "boreal/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "boreal/errors.hpp"

namespace boreal {
namespace {

constexpr double kResidualTarget = 1e-9;  // W m-2
constexpr int kNewtonIterations = 40;
constexpr int kBisectionIterations = 200;
constexpr double kVpdScale = 1.5;         // kPa
constexpr double kGroundEmissivity = 1.0;
constexpr double kSoilMoistureConductivityBase = 0.6;

double pow4(double t) {
  const double t2 = t * t;
  return t2 * t2;
}

double canopy_net_slope(const CanopyInputs& in, double t, const CanopyTerms& terms) {
  const double d_rnet = -in.radiative_cover * 8.0 * in.emissivity * kStefanBoltzmann * t * t * t;
  double d_le = 0.0;
  if (terms.r_net > 0.0 && in.le_coefficient * terms.r_net < in.le_cap) d_le = in.le_coefficient * d_rnet;
  return d_rnet - in.h_can - d_le - in.canopy_trunk_conductance;
}

void check_node(double t, const char* name, const NodeTemperatures& temps) {
  if (!(t >= kMinNodeTemp && t <= kMaxNodeTemp)) {
    std::ostringstream msg;
    msg << "node " << name << " temperature " << t << " K outside [" << kMinNodeTemp << ", "
        << kMaxNodeTemp << "] (can=" << temps.t_can << " trunk=" << temps.t_trunk
        << " snow=" << temps.t_snow << " surf=" << temps.t_soil_surf
        << " deep=" << temps.t_soil_deep << ")";
    throw PhysicsFault(msg.str());
  }
}

}  // namespace

CanopyTerms canopy_terms(const CanopyInputs& in, double t) {
  CanopyTerms c{};
  const double absorbed =
      in.shortwave_down * (1.0 - in.albedo) +
      in.emissivity * (in.longwave_down + kGroundEmissivity * kStefanBoltzmann * pow4(in.ground_temp));
  c.r_net = in.radiative_cover * (absorbed - 2.0 * in.emissivity * kStefanBoltzmann * pow4(t));
  c.h = in.h_can * (t - in.air_temp);
  c.le = std::min(in.le_cap, in.le_coefficient * std::max(0.0, c.r_net));
  c.cond_trunk = in.canopy_trunk_conductance * (t - in.trunk_temp);
  c.net = c.r_net - c.h - c.le - in.g_photo - c.cond_trunk;
  return c;
}

std::string describe(const CanopyInputs& in) {
  std::ostringstream s;
  s.precision(17);
  s << "air_temp=" << in.air_temp << " sw=" << in.shortwave_down << " lw=" << in.longwave_down
    << " ground=" << in.ground_temp << " trunk=" << in.trunk_temp << " cover=" << in.radiative_cover
    << " albedo=" << in.albedo << " emissivity=" << in.emissivity << " h_can=" << in.h_can
    << " g_ct=" << in.canopy_trunk_conductance << " le_coef=" << in.le_coefficient
    << " le_cap=" << in.le_cap << " g_photo=" << in.g_photo << " melt_cap=" << in.melt_capacity;
  return s.str();
}

namespace {

// Root of net(t) - sink = 0; net is strictly decreasing in t.
double solve_root(const CanopyInputs& in, double sink, CanopySolution& sol) {
  auto f = [&](double t) { return canopy_terms(in, t).net - sink; };
  double lo = in.air_temp - 50.0;
  double hi = in.air_temp + 50.0;
  while (f(lo) < 0.0) {
    lo -= 50.0;
    if (lo < 100.0) throw PhysicsFault("canopy balance: no lower bracket; " + describe(in));
  }
  while (f(hi) > 0.0) {
    hi += 50.0;
    if (hi > 500.0) throw PhysicsFault("canopy balance: no upper bracket; " + describe(in));
  }

  double t = std::clamp(in.air_temp, lo, hi);
  for (int i = 0; i < kNewtonIterations; ++i) {
    ++sol.iterations;
    const CanopyTerms terms = canopy_terms(in, t);
    const double value = terms.net - sink;
    if (std::abs(value) < kResidualTarget) return t;
    if (value > 0.0) lo = t; else hi = t;
    const double next = t - value / canopy_net_slope(in, t, terms);
    if (next > lo && next < hi) {
      t = next;
    } else {
      sol.used_bisection = true;
      t = 0.5 * (lo + hi);
    }
    if (hi - lo < 1e-12) return t;
  }
  sol.used_bisection = true;
  for (int i = 0; i < kBisectionIterations; ++i) {
    ++sol.iterations;
    t = 0.5 * (lo + hi);
    const double value = f(t);
    if (std::abs(value) < kResidualTarget || hi - lo < 1e-13) break;
    if (value > 0.0) lo = t; else hi = t;
  }
  return t;
}

}  // namespace

CanopySolution solve_canopy_temperature(const CanopyInputs& in) {
  CanopySolution sol;
  double t;
  double melt = 0.0;
  const double surplus_at_freezing =
      in.melt_capacity > 0.0 ? canopy_terms(in, kFreezingK).net : 0.0;
  if (in.melt_capacity > 0.0 && surplus_at_freezing > 0.0) {
    if (surplus_at_freezing <= in.melt_capacity) {
      t = kFreezingK;
      melt = surplus_at_freezing;
    } else {
      melt = in.melt_capacity;
      t = solve_root(in, melt, sol);
    }
  } else {
    t = solve_root(in, 0.0, sol);
  }
  const CanopyTerms terms = canopy_terms(in, t);
  sol.t_can = t;
  sol.r_net = terms.r_net;
  sol.h = terms.h;
  sol.le = terms.le;
  sol.g_photo = in.g_photo;
  sol.melt = melt;
  sol.cond_trunk = terms.cond_trunk;
  sol.residual = terms.net - melt;
  return sol;
}

StressFactors stress_factors(double vpd, double swc, const SiteParameters& p) {
  StressFactors s;
  s.f_vpd = 1.0 / (1.0 + std::max(0.0, vpd) / kVpdScale);
  s.f_swc = std::clamp(swc / (p.stress_threshold * p.max_water_content), 0.0, 1.0);
  return s;
}

double effective_soil_conductivity(double swc, const SiteParameters& p) {
  const double wetness = std::clamp(swc / p.max_water_content, 0.0, 1.0);
  return p.soil_conductivity *
         (kSoilMoistureConductivityBase + (1.0 - kSoilMoistureConductivityBase) * wetness);
}

NodeTemperatures step_energy(const NodeTemperatures& temps, EnergyFluxes& fx,
                             const PhysicalParams& stand, const Forcing& forcing,
                             const EnergyWaterState& water, const SiteParameters& p,
                             double g_photo, double dt) {
  require(dt > 0.0, "step_energy: dt must be positive");
  const bool snow = water.swe_ground > 0.0;
  const double ground_temp = snow ? temps.t_snow : temps.t_soil_surf;

  const StressFactors stress = stress_factors(forcing.vpd, water.swc, p);
  const double air_c = forcing.air_temp - kFreezingK;
  const double slope = saturation_vapor_pressure_slope(air_c);
  const double pt = p.priestley_taylor_alpha * slope / (slope + p.psychrometric_constant);
  const double water_energy_cap = std::max(0.0, water.swc) * kLatentHeatVaporization / dt;

  CanopyInputs in;
  in.air_temp = forcing.air_temp;
  in.shortwave_down = forcing.shortwave_down;
  in.longwave_down = forcing.longwave_down;
  in.ground_temp = ground_temp;
  in.trunk_temp = temps.t_trunk;
  in.radiative_cover = stand.radiative_cover;
  in.albedo = stand.canopy_albedo;
  in.emissivity = p.canopy_emissivity;
  in.h_can = stand.h_can;
  in.canopy_trunk_conductance = stand.canopy_trunk_conductance;
  in.le_coefficient = pt * stress.f_vpd * stress.f_swc;
  in.le_cap = water_energy_cap;
  in.g_photo = g_photo;
  in.melt_capacity = water.swe_canopy * kLatentHeatFusion / dt;
  const CanopySolution can = solve_canopy_temperature(in);

  fx = EnergyFluxes{};
  fx.r_net_can = can.r_net;
  fx.h_can = can.h;
  fx.le_can = can.le;
  fx.g_photo = can.g_photo;
  fx.melt_can = can.melt;
  fx.cond_can_trunk = can.cond_trunk;
  fx.canopy_residual = can.residual;

  const double cover = stand.radiative_cover;
  const double sw_ground = forcing.shortwave_down * (1.0 - cover);
  const double lw_ground = (1.0 - cover) * forcing.longwave_down +
                           cover * p.canopy_emissivity * kStefanBoltzmann * pow4(can.t_can);

  NodeTemperatures next = temps;
  next.t_can = can.t_can;

  // Trunk: sensible exchange plus conduction from canopy and from the ground node.
  const double cond_ground_trunk = stand.trunk_ground_conductance * (ground_temp - temps.t_trunk);
  const double h_trunk = stand.h_trunk * (temps.t_trunk - forcing.air_temp);
  next.t_trunk = temps.t_trunk + dt * (can.cond_trunk + cond_ground_trunk - h_trunk) / p.trunk_heat_capacity;

  const double k_eff = effective_soil_conductivity(water.swc, p);
  fx.cond_surf_deep = k_eff / p.surface_deep_distance * (temps.t_soil_surf - temps.t_soil_deep);
  fx.cond_deep_boundary =
      k_eff / p.deep_boundary_distance * (temps.t_soil_deep - p.deep_boundary_temp);

  if (snow) {
    const double cond_soil_snow = p.snow_soil_conductance * (temps.t_soil_surf - temps.t_snow);
    fx.r_net_snow = sw_ground * (1.0 - p.snow_albedo) + lw_ground -
                    kGroundEmissivity * kStefanBoltzmann * pow4(temps.t_snow);
    fx.h_snow = stand.h_snow * (temps.t_snow - forcing.air_temp);
    const double net = fx.r_net_snow - fx.h_snow + cond_soil_snow - cond_ground_trunk;
    const double capacity = p.snow_heat_capacity + kIceHeatCapacity * water.swe_ground;
    double t_snow = temps.t_snow + dt * net / capacity;
    if (t_snow > kFreezingK) {
      const double surplus = (t_snow - kFreezingK) * capacity / dt;
      fx.melt_snow = std::min(surplus, water.swe_ground * kLatentHeatFusion / dt);
      t_snow = kFreezingK + (surplus - fx.melt_snow) * dt / capacity;
    }
    next.t_snow = t_snow;
    next.t_soil_surf = temps.t_soil_surf +
                       dt * (-cond_soil_snow - fx.cond_surf_deep) / p.soil_surface_heat_capacity;
  } else {
    fx.r_net_soil = sw_ground * (1.0 - p.soil_albedo) + lw_ground -
                    kGroundEmissivity * kStefanBoltzmann * pow4(temps.t_soil_surf);
    fx.h_soil = stand.h_soil * (temps.t_soil_surf - forcing.air_temp);
    const double le_potential =
        pt * std::max(0.0, fx.r_net_soil) * stress.f_swc * p.soil_evaporation_factor;
    fx.le_soil = std::min(le_potential, std::max(0.0, water_energy_cap - can.le));
    const double net = fx.r_net_soil - fx.h_soil - fx.le_soil - fx.cond_surf_deep - cond_ground_trunk;
    next.t_soil_surf = temps.t_soil_surf + dt * net / p.soil_surface_heat_capacity;
    next.t_snow = std::min(next.t_soil_surf, kFreezingK);
  }
  next.t_soil_deep = temps.t_soil_deep +
                     dt * (fx.cond_surf_deep - fx.cond_deep_boundary) / p.soil_deep_heat_capacity;

  check_node(next.t_can, "canopy", next);
  check_node(next.t_trunk, "trunk", next);
  check_node(next.t_snow, "snow", next);
  check_node(next.t_soil_surf, "soil_surface", next);
  check_node(next.t_soil_deep, "soil_deep", next);
  return next;
}

BoundaryFluxAccumulator accumulate_boundary_flux(BoundaryFluxAccumulator acc,
                                                 double cond_deep_boundary, double dt,
                                                 double joules_per_degree_day) {
  const double energy = cond_deep_boundary * dt / joules_per_degree_day;
  if (energy > 0.0) acc.f_p += energy;
  else if (energy < 0.0) acc.f_n -= energy;
  return acc;
}

}  // namespace boreal
