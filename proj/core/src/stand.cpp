#include "boreal/stand.hpp"

#include <algorithm>
#include <cmath>

#include "boreal/errors.hpp"

namespace boreal {
namespace {

constexpr double kHalfSaturationDensity = 500.0;  // stems/ha
constexpr double kLeafExtinction = 0.5;
constexpr double kStemAreaPerCover = 0.5;
constexpr double kInterceptionLaiScale = 0.7;
constexpr double kSelfThinningMax = 0.05;
constexpr double kSelfThinningExponent = 4.0;

bool is_allowed(double v, std::initializer_list<double> allowed) {
  return std::any_of(allowed.begin(), allowed.end(), [v](double a) { return v == a; });
}

}  // namespace

double AgeDistribution::total() const {
  double t = 0.0;
  for (const auto& sp : stems)
    for (double n : sp) t += n;
  return t;
}

double AgeDistribution::species_total(Species s) const {
  double t = 0.0;
  for (double n : stems[static_cast<std::size_t>(s)]) t += n;
  return t;
}

double AgeDistribution::class_total(AgeClass c) const {
  const auto k = static_cast<std::size_t>(c);
  return stems[0][k] + stems[1][k];
}

double AgeDistribution::conifer_fraction() const {
  const double t = total();
  return t > 0.0 ? species_total(Species::kConifer) / t : 0.0;
}

double AgeDistribution::weighted_total() const {
  double t = 0.0;
  for (const auto& sp : stems)
    for (std::size_t k = 0; k < kAgeClassCount; ++k) t += sp[k] * kCanopyFactor[k];
  return t;
}

std::pair<StandState, ManagementOutcome> apply_management(const StandState& s,
                                                          double density_change,
                                                          double target_conifer_fraction,
                                                          const ManagementRules& rules) {
  require(is_allowed(density_change, {-100.0, -50.0, 0.0, 50.0, 100.0}),
          "apply_management: density_change not in {-100,-50,0,50,100}");
  require(is_allowed(target_conifer_fraction, {0.0, 0.25, 0.5, 0.75, 1.0}),
          "apply_management: target conifer fraction not in {0,0.25,0.5,0.75,1}");

  StandState out = s;
  ManagementOutcome outcome;
  outcome.conifer_fraction_before = s.age.conifer_fraction();
  const double density = s.age.total();

  if (density_change < 0.0) {
    const double requested = -density_change;
    const double removable = std::max(0.0, density - rules.min_thinning_density);
    outcome.ineffective_thinning =
        requested > s.age.class_total(AgeClass::kOld) || requested > removable;
    double remaining = std::min(requested, removable);
    const double weighted_before = s.age.weighted_total();
    double weighted_removed = 0.0;
    for (std::size_t k = kAgeClassCount; k-- > 0 && remaining > 0.0;) {
      const double in_class = s.age.stems[0][k] + s.age.stems[1][k];
      if (in_class <= 0.0) continue;
      const double take = std::min(remaining, in_class);
      for (std::size_t sp = 0; sp < kSpeciesCount; ++sp) {
        const double removed = take * (s.age.stems[sp][k] / in_class);
        out.age.stems[sp][k] = std::max(0.0, s.age.stems[sp][k] - removed);
      }
      weighted_removed += take * kCanopyFactor[k];
      outcome.stems_removed += take;
      remaining -= take;
    }
    if (weighted_before > 0.0 && weighted_removed > 0.0) {
      outcome.removed_carbon =
          std::min(s.biomass_carbon, s.biomass_carbon * (weighted_removed / weighted_before));
    }
    outcome.hwp_stored = rules.hwp_fraction * outcome.removed_carbon;
    outcome.harvest_loss = outcome.removed_carbon - outcome.hwp_stored;
    out.biomass_carbon = std::max(0.0, s.biomass_carbon - outcome.removed_carbon);
    out.hwp_carbon_cumulative += outcome.hwp_stored;
  } else if (density_change > 0.0) {
    const double room = rules.max_density - density;
    if (room <= 0.0) {
      outcome.ineffective_planting = true;
    } else {
      const double added = std::min(density_change, room);
      out.age.at(Species::kConifer, AgeClass::kSeedling) += added * target_conifer_fraction;
      out.age.at(Species::kDeciduous, AgeClass::kSeedling) += added * (1.0 - target_conifer_fraction);
      outcome.stems_planted = added;
    }
  }
  outcome.conifer_fraction_after = out.age.conifer_fraction();
  return {out, outcome};
}

double phenology_factor(const SiteParameters& p, double day_of_year) {
  const double green = 1.0 / (1.0 + std::exp(-p.growth_rate * (day_of_year - p.growth_start_day)));
  const double fall = 1.0 / (1.0 + std::exp(p.fall_rate * (day_of_year - p.fall_start_day)));
  return green * fall;
}

PhysicalParams derive_physical_params(const StandState& s, const SiteParameters& p,
                                      double phenology) {
  require(phenology >= 0.0 && phenology <= 1.0, "derive_physical_params: phenology outside [0,1]");
  PhysicalParams out;
  const double density = s.age.total();

  double weighted[kSpeciesCount] = {0.0, 0.0};
  double lue_weighted = 0.0;
  for (std::size_t sp = 0; sp < kSpeciesCount; ++sp) {
    for (std::size_t k = 0; k < kAgeClassCount; ++k) {
      const double w = s.age.stems[sp][k] * kCanopyFactor[k];
      weighted[sp] += w;
      lue_weighted += w * kLueAgeFactor[k];
    }
  }
  const double saturation = 1.0 / (density + kHalfSaturationDensity);
  out.lai_conifer = p.max_lai_conifer * weighted[0] * saturation;
  const double lai_deciduous_full = p.max_lai_deciduous * weighted[1] * saturation;
  out.lai_deciduous = lai_deciduous_full * phenology;
  out.lai = out.lai_conifer + out.lai_deciduous;

  const double albedo_weight = out.lai_conifer + lai_deciduous_full;
  if (albedo_weight > 0.0) {
    const double deciduous_albedo =
        phenology * p.base_albedo_deciduous + (1.0 - phenology) * p.bare_branch_albedo;
    out.canopy_albedo =
        (out.lai_conifer * p.base_albedo_conifer + lai_deciduous_full * deciduous_albedo) /
        albedo_weight;
  } else {
    out.canopy_albedo = p.bare_branch_albedo;
  }

  out.canopy_area_fraction = density * saturation;
  out.radiative_cover =
      1.0 - std::exp(-kLeafExtinction * (out.lai + kStemAreaPerCover * out.canopy_area_fraction));
  out.par_absorption = 1.0 - std::exp(-kLeafExtinction * out.lai);

  if (out.lai > 0.0) {
    const double conifer_share = out.lai_conifer / out.lai;
    const double coefficient =
        conifer_share * p.interception_conifer + (1.0 - conifer_share) * p.interception_deciduous;
    out.interception_efficiency = coefficient * (1.0 - std::exp(-kInterceptionLaiScale * out.lai));
  }
  out.canopy_snow_capacity = p.canopy_snow_capacity_per_lai * out.lai;

  const double weighted_all = weighted[0] + weighted[1];
  out.lue_effective = weighted_all > 0.0 ? p.lue_base * lue_weighted / weighted_all : 0.0;

  // Rougher, denser canopies couple more tightly to the air and shelter the floor.
  const double cover = out.canopy_area_fraction;
  out.h_can = p.h_can * (0.5 + 0.5 * cover);
  out.h_trunk = p.h_trunk;
  out.h_snow = p.h_snow * (1.0 - 0.5 * cover);
  out.h_soil = p.h_soil * (1.0 - 0.5 * cover);
  out.canopy_trunk_conductance = p.canopy_trunk_conductance * cover;
  out.trunk_ground_conductance = p.trunk_ground_conductance * cover;
  return out;
}

double mortality_rate(double density, const SiteParameters& p) {
  const double crowding = density / p.max_natural_density;
  return p.natural_mortality + kSelfThinningMax * std::pow(crowding, kSelfThinningExponent);
}

AgeDistribution age_one_year(const AgeDistribution& a) {
  AgeDistribution out = a;
  for (std::size_t sp = 0; sp < kSpeciesCount; ++sp) {
    for (std::size_t k = 0; k + 1 < kAgeClassCount; ++k) {
      const double moving = a.stems[sp][k] / kAgeClassWidth[k];
      out.stems[sp][k] -= moving;
      out.stems[sp][k + 1] += moving;
    }
  }
  return out;
}

double apply_fractional_mortality(AgeDistribution& a, const std::array<double, kSpeciesCount>& fraction,
                                  double biomass) {
  const double weighted_before = a.weighted_total();
  double weighted_killed = 0.0;
  for (std::size_t sp = 0; sp < kSpeciesCount; ++sp) {
    const double f = std::clamp(fraction[sp], 0.0, 1.0);
    for (std::size_t k = 0; k < kAgeClassCount; ++k) {
      const double killed = a.stems[sp][k] * f;
      a.stems[sp][k] -= killed;
      weighted_killed += killed * kCanopyFactor[k];
    }
  }
  if (weighted_before <= 0.0) return 0.0;
  return std::min(biomass, biomass * (weighted_killed / weighted_before));
}

std::pair<StandState, DemographyReport> end_of_year_demography(const StandState& s,
                                                               const SiteParameters& p,
                                                               RngStream& rng,
                                                               const DemographyOptions& opt) {
  StandState out = s;
  DemographyReport report;
  const double u = rng.uniform();
  const double density = s.age.total();

  if (opt.mortality && density > 0.0) {
    const double stochastic = opt.stochastic_mortality ? 0.5 + u : 1.0;
    const double base = p.natural_mortality * stochastic;
    const double rate = std::clamp(mortality_rate(density, p) - p.natural_mortality + base, 0.0, 1.0);
    report.mortality_rate = rate;
    report.mortality_carbon = apply_fractional_mortality(out.age, {rate, rate}, s.biomass_carbon);
    report.stems_died = density - out.age.total();
  }

  if (opt.recruitment) {
    const double after = out.age.total();
    const double space = std::max(0.0, 1.0 - after / p.max_natural_density);
    const double recruits = p.recruitment_rate * p.max_natural_density * space;
    const double conifer_share = after > 0.0 ? out.age.conifer_fraction() : 0.5;
    out.age.at(Species::kConifer, AgeClass::kSeedling) += recruits * conifer_share;
    out.age.at(Species::kDeciduous, AgeClass::kSeedling) += recruits * (1.0 - conifer_share);
    report.stems_recruited = recruits;
  }

  out.age = age_one_year(out.age);
  return {out, report};
}

}  // namespace boreal
