#include "boreal/disturb.hpp"

#include <algorithm>
#include <cmath>

#include "boreal/errors.hpp"

namespace boreal {

double fire_probability(const StandState& s, const SiteParameters& p, double drought_index,
                        double mean_temp_c, const DisturbanceModel& m) {
  if (drought_index < p.fire_drought_threshold || mean_temp_c < m.hot_day_threshold) return 0.0;
  const double drought_multiplier = drought_index / p.fire_drought_threshold;
  const double flammability = 1.0 + m.conifer_flammability * s.age.conifer_fraction();
  return std::clamp(p.fire_base_probability * drought_multiplier * flammability, 0.0, 1.0);
}

std::pair<StandState, DisturbanceReport> fire_check(const StandState& s, const SiteParameters& p,
                                                    double drought_index, double mean_temp_c,
                                                    RngStream& rng, bool allow_ignition,
                                                    const DisturbanceModel& m) {
  const double u_ignite = rng.uniform();
  const double u_severity = rng.uniform();
  DisturbanceReport r;
  StandState out = s;
  if (!allow_ignition) return {out, r};
  r.fire_probability = fire_probability(s, p, drought_index, mean_temp_c, m);
  if (!(u_ignite < r.fire_probability) || s.age.total() <= 0.0) return {out, r};

  r.fire_occurred = true;
  r.fire_mortality_fraction =
      m.fire_mortality_min + (m.fire_mortality_max - m.fire_mortality_min) * u_severity;
  const double killed = apply_fractional_mortality(
      out.age, {r.fire_mortality_fraction, r.fire_mortality_fraction}, s.biomass_carbon);
  r.fire_carbon_combusted = killed * m.fire_combusted_fraction;
  r.fire_carbon_to_soil = killed - r.fire_carbon_combusted;
  return {out, r};
}

double insect_probability(const StandState& s, const SiteParameters& p, double mean_winter_temp_c,
                          const DisturbanceModel& m) {
  const double winter =
      std::exp(m.insect_winter_sensitivity * (mean_winter_temp_c - m.insect_winter_reference));
  const double density = s.age.total() / m.insect_density_reference;
  return std::clamp(p.insect_base_probability * winter * density, 0.0, 1.0);
}

std::pair<StandState, DisturbanceReport> insect_check(const StandState& s, const SiteParameters& p,
                                                      double mean_winter_temp_c, RngStream& rng,
                                                      const DisturbanceModel& m) {
  const double u_outbreak = rng.uniform();
  rng.uniform();  // reserved so the stream layout matches the fire check
  DisturbanceReport r;
  StandState out = s;
  r.insect_probability = insect_probability(s, p, mean_winter_temp_c, m);
  const double total = s.age.total();
  if (!(u_outbreak < r.insect_probability) || total <= 0.0) return {out, r};

  r.insect_occurred = true;
  const double conifer_rate = std::clamp(p.insect_mortality_rate, 0.0, 1.0);
  const double deciduous_rate = conifer_rate / m.insect_conifer_bias;
  const double conifers = s.age.species_total(Species::kConifer);
  const double deciduous = s.age.species_total(Species::kDeciduous);
  r.insect_carbon_to_soil =
      apply_fractional_mortality(out.age, {conifer_rate, deciduous_rate}, s.biomass_carbon);
  r.insect_mortality_fraction =
      std::clamp((conifers * conifer_rate + deciduous * deciduous_rate) / total, 0.0, 1.0);
  return {out, r};
}

}  // namespace boreal
