#include "boreal/params.hpp"

#include <cstdio>
#include <cstring>
#include <sstream>

#include "boreal/errors.hpp"

namespace boreal {
namespace {

using P = SiteParameters;

constexpr ParamSpec sampled(std::string_view key, double P::*field, double lo, double hi,
                            std::string_view unit) {
  return {key, field, lo, hi, 0.5 * (lo + hi), unit, true};
}

constexpr ParamSpec fixed(std::string_view key, double P::*field, double value, double lo,
                          double hi, std::string_view unit) {
  return {key, field, lo, hi, value, unit, false};
}

constexpr std::array<ParamSpec, kSiteParameterCount> kManifest{{
    sampled("latitude", &P::latitude, 56.0, 65.0, "degN"),
    sampled("mean_annual_temp_offset", &P::mean_annual_temp_offset, -10.0, -5.0, "degC"),
    sampled("seasonal_amplitude", &P::seasonal_amplitude, 20.0, 25.0, "degC"),
    sampled("diurnal_amplitude", &P::diurnal_amplitude, 4.0, 8.0, "degC"),
    sampled("peak_diurnal_hour", &P::peak_diurnal_hour, 3.0, 5.0, "h"),
    sampled("daily_noise_std", &P::daily_noise_std, 1.0, 2.0, "degC"),
    sampled("relative_humidity", &P::relative_humidity, 0.6, 0.8, "fraction"),
    sampled("summer_rain_prob", &P::summer_rain_prob, 0.10, 0.20, "1/day"),
    sampled("summer_rain_amount", &P::summer_rain_amount, 10.0, 20.0, "mm/day"),
    sampled("winter_snow_prob", &P::winter_snow_prob, 0.15, 0.30, "1/day"),
    sampled("winter_snow_amount", &P::winter_snow_amount, 3.0, 8.0, "mm/day"),
    sampled("soil_conductivity", &P::soil_conductivity, 0.8, 1.6, "W/m/K"),
    sampled("max_water_content", &P::max_water_content, 100.0, 200.0, "mm"),
    sampled("stress_threshold", &P::stress_threshold, 0.3, 0.6, "fraction"),
    sampled("deep_boundary_temp", &P::deep_boundary_temp, 268.0, 272.0, "K"),
    sampled("max_lai_conifer", &P::max_lai_conifer, 3.0, 5.0, "m2/m2"),
    sampled("max_lai_deciduous", &P::max_lai_deciduous, 4.0, 6.0, "m2/m2"),
    sampled("base_albedo_conifer", &P::base_albedo_conifer, 0.07, 0.11, "fraction"),
    sampled("base_albedo_deciduous", &P::base_albedo_deciduous, 0.15, 0.20, "fraction"),
    sampled("base_respiration", &P::base_respiration, 0.30, 0.40, "kgC/m2/yr"),
    sampled("soil_respiration", &P::soil_respiration, 0.4, 0.6, "kgC/m2/yr"),
    sampled("q10_factor", &P::q10_factor, 1.8, 2.3, "-"),
    sampled("litterfall_fraction", &P::litterfall_fraction, 0.03, 0.04, "1/yr"),
    sampled("natural_mortality", &P::natural_mortality, 0.02, 0.03, "1/yr"),
    sampled("recruitment_rate", &P::recruitment_rate, 0.005, 0.015, "1/yr"),
    sampled("max_natural_density", &P::max_natural_density, 1500.0, 2000.0, "stems/ha"),
    sampled("fire_drought_threshold", &P::fire_drought_threshold, 20.0, 40.0, "index"),
    sampled("fire_base_probability", &P::fire_base_probability, 0.0001, 0.0005, "1/yr"),
    sampled("insect_base_probability", &P::insect_base_probability, 0.02, 0.05, "1/yr"),
    sampled("insect_mortality_rate", &P::insect_mortality_rate, 0.02, 0.05, "fraction"),
    sampled("growth_start_day", &P::growth_start_day, 130.0, 150.0, "DOY"),
    sampled("fall_start_day", &P::fall_start_day, 260.0, 280.0, "DOY"),
    sampled("growth_rate", &P::growth_rate, 0.08, 0.15, "1/day"),
    sampled("fall_rate", &P::fall_rate, 0.08, 0.15, "1/day"),

    fixed("canopy_emissivity", &P::canopy_emissivity, 0.97, 0.90, 1.00, "-"),
    fixed("priestley_taylor_alpha", &P::priestley_taylor_alpha, 1.26, 1.0, 1.5, "-"),
    fixed("snow_albedo", &P::snow_albedo, 0.80, 0.6, 0.9, "fraction"),
    fixed("soil_albedo", &P::soil_albedo, 0.15, 0.10, 0.30, "fraction"),
    fixed("bare_branch_albedo", &P::bare_branch_albedo, 0.25, 0.15, 0.35, "fraction"),
    fixed("psychrometric_constant", &P::psychrometric_constant, 0.066, 0.060, 0.070, "kPa/K"),
    fixed("energy_per_gram_carbon", &P::energy_per_gram_carbon, 5.0e5, 1.0e4, 1.0e6, "J/gC"),
    fixed("h_can", &P::h_can, 20.0, 10.0, 30.0, "W/m2/K"),
    fixed("h_trunk", &P::h_trunk, 5.0, 2.0, 10.0, "W/m2/K"),
    fixed("h_snow", &P::h_snow, 8.0, 4.0, 12.0, "W/m2/K"),
    fixed("h_soil", &P::h_soil, 10.0, 5.0, 15.0, "W/m2/K"),
    fixed("canopy_trunk_conductance", &P::canopy_trunk_conductance, 2.0, 0.5, 5.0, "W/m2/K"),
    fixed("trunk_ground_conductance", &P::trunk_ground_conductance, 1.0, 0.5, 5.0, "W/m2/K"),
    fixed("snow_soil_conductance", &P::snow_soil_conductance, 1.0, 0.3, 3.0, "W/m2/K"),
    fixed("trunk_heat_capacity", &P::trunk_heat_capacity, 2.0e5, 1.0e5, 4.0e5, "J/m2/K"),
    fixed("snow_heat_capacity", &P::snow_heat_capacity, 1.5e5, 1.0e5, 3.0e5, "J/m2/K"),
    fixed("soil_surface_heat_capacity", &P::soil_surface_heat_capacity, 4.0e5, 2.0e5, 8.0e5,
          "J/m2/K"),
    fixed("soil_deep_heat_capacity", &P::soil_deep_heat_capacity, 2.0e6, 1.0e6, 4.0e6, "J/m2/K"),
    fixed("surface_deep_distance", &P::surface_deep_distance, 0.5, 0.25, 1.0, "m"),
    fixed("deep_boundary_distance", &P::deep_boundary_distance, 1.0, 0.5, 2.0, "m"),
    fixed("lue_base", &P::lue_base, 1.0, 0.5, 2.0, "gC/MJ"),
    fixed("par_fraction", &P::par_fraction, 0.48, 0.40, 0.55, "fraction"),
    fixed("interception_conifer", &P::interception_conifer, 0.6, 0.3, 0.8, "fraction"),
    fixed("interception_deciduous", &P::interception_deciduous, 0.3, 0.1, 0.5, "fraction"),
    fixed("canopy_snow_capacity_per_lai", &P::canopy_snow_capacity_per_lai, 0.5, 0.2, 1.0, "mm"),
    fixed("respiration_reference_temp", &P::respiration_reference_temp, 283.15, 273.15, 293.15,
          "K"),
    fixed("atmospheric_transmissivity", &P::atmospheric_transmissivity, 0.75, 0.60, 0.85, "-"),
    fixed("soil_evaporation_factor", &P::soil_evaporation_factor, 0.3, 0.1, 0.6, "-"),
}};

static_assert(kManifest[kSampledParameterCount - 1].sampled);
static_assert(!kManifest[kSampledParameterCount].sampled);

}  // namespace

const std::array<ParamSpec, kSiteParameterCount>& site_parameter_manifest() { return kManifest; }

std::string render_site_parameter_manifest() {
  std::ostringstream out;
  out << "# slot key min max default unit kind\n";
  char line[256];
  for (std::size_t i = 0; i < kManifest.size(); ++i) {
    const auto& s = kManifest[i];
    std::snprintf(line, sizeof line, "%zu %.*s %.17g %.17g %.17g %.*s %s\n", i,
                  static_cast<int>(s.key.size()), s.key.data(), s.min, s.max, s.default_value,
                  static_cast<int>(s.unit.size()), s.unit.data(), s.sampled ? "sampled" : "fixed");
    out << line;
  }
  return out.str();
}

std::optional<std::size_t> find_parameter_slot(std::string_view key) {
  for (std::size_t i = 0; i < kManifest.size(); ++i) {
    if (kManifest[i].key == key) return i;
  }
  return std::nullopt;
}

SiteParameters default_site_parameters() {
  SiteParameters p{};
  for (const auto& s : kManifest) p.*(s.field) = s.default_value;
  return p;
}

SiteParameters sample_site_parameters(RngStream& rng) {
  SiteParameters p = default_site_parameters();
  for (std::size_t i = 0; i < kSampledParameterCount; ++i) {
    const auto& s = kManifest[i];
    p.*(s.field) = rng.uniform(s.min, s.max);
  }
  return p;
}

SiteParameters fixed_site_parameters(std::uint64_t site_seed) {
  RngStream rng = RngStream::split(site_seed, StreamId::kParameters);
  return sample_site_parameters(rng);
}

void apply_parameter_pins(SiteParameters& p, const ParameterPins& pins) {
  for (const auto& [key, value] : pins) {
    const auto slot = find_parameter_slot(key);
    if (!slot) throw ConfigError("unknown site parameter '" + key + "'");
    const auto& s = kManifest[*slot];
    if (!(value >= s.min && value <= s.max)) {
      throw ConfigError("site parameter '" + key + "' = " + std::to_string(value) +
                        " outside its range [" + std::to_string(s.min) + ", " +
                        std::to_string(s.max) + "]");
    }
    p.*(s.field) = value;
  }
}

std::array<double, kSiteParameterCount> normalize_site_parameters(const SiteParameters& p) {
  std::array<double, kSiteParameterCount> out{};
  for (std::size_t i = 0; i < kManifest.size(); ++i) {
    const auto& s = kManifest[i];
    const double v = p.*(s.field);
    if (!(v >= s.min && v <= s.max)) {
      throw ContractViolation("site parameter '" + std::string(s.key) + "' = " +
                              std::to_string(v) + " outside its normalization range");
    }
    out[i] = (v - s.min) / (s.max - s.min);
  }
  return out;
}

std::optional<std::string> validate_site_parameters(const SiteParameters& p) {
  for (const auto& s : kManifest) {
    const double v = p.*(s.field);
    if (!(v >= s.min && v <= s.max)) return std::string(s.key) + " out of range";
  }
  if (!(p.growth_start_day < p.fall_start_day)) return "growth_start_day >= fall_start_day";
  if (p.deep_boundary_temp > 273.15) return "deep_boundary_temp above freezing";
  return std::nullopt;
}

std::uint64_t site_parameter_digest(const SiteParameters& p) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const ParamSpec& spec : site_parameter_manifest()) {
    std::uint64_t bits = 0;
    const double v = p.*spec.field;
    std::memcpy(&bits, &v, sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

}  // namespace boreal
