#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "boreal/rng.hpp"

namespace boreal {

/// Episode-level physics configuration of one forest site.
///
/// The first 34 fields are drawn uniformly from their ranges when a site is
/// sampled. The remaining 28 are physics constants held at their defaults
/// unless pinned by configuration. All 62 appear, in declaration order, in the
/// normalized site-context vector; `site_parameter_manifest()` lists them.
struct SiteParameters {
  // Climate forcing
  double latitude;                 // deg N
  double mean_annual_temp_offset;  // deg C, annual mean air temperature
  double seasonal_amplitude;       // deg C
  double diurnal_amplitude;        // deg C, full daily swing
  double peak_diurnal_hour;        // h after solar noon
  double daily_noise_std;          // deg C
  double relative_humidity;        // fraction
  // Precipitation
  double summer_rain_prob;    // 1/day
  double summer_rain_amount;  // mm/day
  double winter_snow_prob;    // 1/day
  double winter_snow_amount;  // mm/day
  // Soil
  double soil_conductivity;   // W m-1 K-1
  double max_water_content;   // mm
  double stress_threshold;    // fraction
  double deep_boundary_temp;  // K
  // Vegetation
  double max_lai_conifer;
  double max_lai_deciduous;
  double base_albedo_conifer;
  double base_albedo_deciduous;
  // Carbon cycle
  double base_respiration;     // kgC m-2 yr-1
  double soil_respiration;     // kgC m-2 yr-1
  double q10_factor;
  double litterfall_fraction;  // 1/yr
  // Demography
  double natural_mortality;    // 1/yr
  double recruitment_rate;     // 1/yr
  double max_natural_density;  // stems/ha
  // Disturbances
  double fire_drought_threshold;
  double fire_base_probability;
  double insect_base_probability;
  double insect_mortality_rate;
  // Phenology
  double growth_start_day;
  double fall_start_day;
  double growth_rate;
  double fall_rate;

  // Fixed physics constants
  double canopy_emissivity;
  double priestley_taylor_alpha;
  double snow_albedo;
  double soil_albedo;
  double bare_branch_albedo;
  double psychrometric_constant;     // kPa K-1
  double energy_per_gram_carbon;     // J gC-1
  double h_can;                      // W m-2 K-1
  double h_trunk;
  double h_snow;
  double h_soil;
  double canopy_trunk_conductance;   // W m-2 K-1
  double trunk_ground_conductance;
  double snow_soil_conductance;
  double trunk_heat_capacity;        // J m-2 K-1
  double snow_heat_capacity;         // J m-2 K-1, excluding the SWE term
  double soil_surface_heat_capacity;
  double soil_deep_heat_capacity;
  double surface_deep_distance;      // m
  double deep_boundary_distance;     // m
  double lue_base;                   // gC MJ-1 absorbed PAR
  double par_fraction;
  double interception_conifer;
  double interception_deciduous;
  double canopy_snow_capacity_per_lai;  // mm
  double respiration_reference_temp;    // K
  double atmospheric_transmissivity;
  double soil_evaporation_factor;

  friend bool operator==(const SiteParameters&, const SiteParameters&) = default;
};

inline constexpr std::size_t kSiteParameterCount = 62;
inline constexpr std::size_t kSampledParameterCount = 34;

struct ParamSpec {
  std::string_view key;
  double SiteParameters::*field;
  double min;
  double max;
  double default_value;
  std::string_view unit;
  bool sampled;
};

/// The 62-slot manifest, in slot order.
const std::array<ParamSpec, kSiteParameterCount>& site_parameter_manifest();

/// Manifest rendered as the plain-text table shipped in core/data.
std::string render_site_parameter_manifest();

std::optional<std::size_t> find_parameter_slot(std::string_view key);

/// Every field at its default (range midpoint for sampled fields).
SiteParameters default_site_parameters();

/// Draws the 34 sampled fields in manifest order, one uniform each.
SiteParameters sample_site_parameters(RngStream& rng);

/// The site frozen by `site_seed`; used by site-specific mode.
SiteParameters fixed_site_parameters(std::uint64_t site_seed);

/// Overrides by key. Unknown keys and out-of-range values throw ConfigError.
using ParameterPins = std::map<std::string, double, std::less<>>;
void apply_parameter_pins(SiteParameters& p, const ParameterPins& pins);

/// (value - min) / (max - min) per slot. Out-of-range values throw ContractViolation.
std::array<double, kSiteParameterCount> normalize_site_parameters(const SiteParameters& p);

/// FNV-1a over the bit patterns of all slots in manifest order.
std::uint64_t site_parameter_digest(const SiteParameters& p);

/// Checks ranges and the ordering invariants; returns a description of the first
/// violation, or nullopt.
std::optional<std::string> validate_site_parameters(const SiteParameters& p);

}  // namespace boreal
