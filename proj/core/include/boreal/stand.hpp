#pragma once

#include <array>
#include <cstddef>
#include <utility>

#include "boreal/params.hpp"
#include "boreal/rng.hpp"

namespace boreal {

enum class Species : std::size_t { kConifer = 0, kDeciduous = 1 };
inline constexpr std::size_t kSpeciesCount = 2;

/// seedling 0-5, sapling 6-20, young 21-50, mature 51-100, old 101+ years.
enum class AgeClass : std::size_t { kSeedling = 0, kSapling, kYoung, kMature, kOld };
inline constexpr std::size_t kAgeClassCount = 5;

/// Years spent in each class; the old class is absorbing.
inline constexpr std::array<double, kAgeClassCount - 1> kAgeClassWidth{5.0, 15.0, 30.0, 50.0};
/// Relative leaf area per stem by class. Also the per-stem biomass weights.
inline constexpr std::array<double, kAgeClassCount> kCanopyFactor{0.2, 0.5, 0.8, 1.0, 0.9};
/// Light-use efficiency scaling by class.
inline constexpr std::array<double, kAgeClassCount> kLueAgeFactor{1.0, 1.0, 0.95, 0.85, 0.7};

/// Stems per hectare by species and age class.
struct AgeDistribution {
  std::array<std::array<double, kAgeClassCount>, kSpeciesCount> stems{};

  double& at(Species s, AgeClass c) { return stems[static_cast<std::size_t>(s)][static_cast<std::size_t>(c)]; }
  double at(Species s, AgeClass c) const {
    return stems[static_cast<std::size_t>(s)][static_cast<std::size_t>(c)];
  }

  double total() const;
  double species_total(Species s) const;
  double class_total(AgeClass c) const;
  /// Conifer share of all stems; 0 for an empty stand.
  double conifer_fraction() const;
  /// Sum of stems weighted by kCanopyFactor, the denominator of per-stem carbon shares.
  double weighted_total() const;

  friend bool operator==(const AgeDistribution&, const AgeDistribution&) = default;
};

struct StandState {
  AgeDistribution age;
  double biomass_carbon = 0.0;          // kgC m-2
  double soil_carbon = 0.0;             // kgC m-2
  double hwp_carbon_cumulative = 0.0;   // kgC m-2
  int year = 0;

  friend bool operator==(const StandState&, const StandState&) = default;
};

struct ManagementRules {
  double min_thinning_density = 150.0;  // stems/ha
  double max_density = 2000.0;          // stems/ha
  double hwp_fraction = 0.95;
};

struct ManagementOutcome {
  double stems_removed = 0.0;
  double stems_planted = 0.0;
  double removed_carbon = 0.0;  // kgC m-2, = hwp_stored + harvest_loss
  double hwp_stored = 0.0;
  double harvest_loss = 0.0;
  bool ineffective_thinning = false;
  bool ineffective_planting = false;
  double conifer_fraction_before = 0.0;
  double conifer_fraction_after = 0.0;
};

/// Thinning removes the oldest stems first and stops at the density floor.
/// Planting adds seedlings split by `target_conifer_fraction` up to the cap.
/// `density_change` must be one of {-100, -50, 0, 50, 100} and the target one
/// of {0, 0.25, 0.5, 0.75, 1}.
std::pair<StandState, ManagementOutcome> apply_management(const StandState& s,
                                                          double density_change,
                                                          double target_conifer_fraction,
                                                          const ManagementRules& rules = {});

/// Surface properties seen by the physics loop.
struct PhysicalParams {
  double lai = 0.0;
  double lai_conifer = 0.0;
  double lai_deciduous = 0.0;          // leaves present at this phenology
  double canopy_albedo = 0.0;
  double canopy_area_fraction = 0.0;   // structural cover from stem density
  double radiative_cover = 0.0;        // share of radiation intercepted by the canopy node
  double par_absorption = 0.0;         // share of PAR absorbed by leaves
  double interception_efficiency = 0.0;
  double canopy_snow_capacity = 0.0;   // mm
  double lue_effective = 0.0;          // gC MJ-1
  double h_can = 0.0;                  // W m-2 K-1
  double h_trunk = 0.0;
  double h_snow = 0.0;
  double h_soil = 0.0;
  double canopy_trunk_conductance = 0.0;
  double trunk_ground_conductance = 0.0;
};

/// Deciduous leaf-on fraction for a day of year (logistic green-up and fall).
double phenology_factor(const SiteParameters& p, double day_of_year);

PhysicalParams derive_physical_params(const StandState& s, const SiteParameters& p,
                                      double phenology);

struct DemographyOptions {
  bool stochastic_mortality = true;
  bool mortality = true;
  bool recruitment = true;
};

struct DemographyReport {
  double mortality_rate = 0.0;   // applied annual rate
  double stems_died = 0.0;
  double stems_recruited = 0.0;
  double mortality_carbon = 0.0; // kgC m-2, share of s.biomass_carbon on dead stems
};

/// Annual mortality rate from base rate and self-thinning (without the stochastic factor).
double mortality_rate(double density, const SiteParameters& p);

/// Mortality, recruitment, then one year of aging. Consumes one draw.
/// Carbon pools are not modified; the report carries the mortality carbon.
std::pair<StandState, DemographyReport> end_of_year_demography(const StandState& s,
                                                               const SiteParameters& p,
                                                               RngStream& rng,
                                                               const DemographyOptions& opt = {});

/// Moves 1/width of each class into the next one.
AgeDistribution age_one_year(const AgeDistribution& a);

/// Kills `fraction[species]` of every class; returns the carbon share of the
/// dead stems relative to `biomass`.
double apply_fractional_mortality(AgeDistribution& a, const std::array<double, kSpeciesCount>& fraction,
                                  double biomass);

}  // namespace boreal
