#pragma once

#include <array>
#include <ostream>
#include <vector>

#include "boreal/params.hpp"
#include "boreal/rng.hpp"

namespace boreal {

inline constexpr int kDaysPerYear = 365;
inline constexpr double kFreezingK = 273.15;
inline constexpr double kStefanBoltzmann = 5.670374419e-8;

struct DailyWeather {
  int day_of_year = 1;                   // 1..365
  double mean_temp = 0.0;                // deg C
  double diurnal_amplitude_today = 0.0;  // deg C
  double precip_amount = 0.0;            // mm
  bool precip_is_snow = false;
  double drought_index_contribution = 0.0;
  bool summer = false;  // seasonal (noise-free) mean at or above 0 deg C
};

struct Forcing {
  double air_temp = kFreezingK;  // K
  double shortwave_down = 0.0;   // W m-2
  double longwave_down = 0.0;    // W m-2
  double vpd = 0.0;              // kPa
  double precip_rate = 0.0;      // mm per timestep
  bool precip_is_snow = false;
};

/// Tunables of the weather generator that have no sampled counterpart.
struct WeatherModel {
  double solar_constant = 1361.0;
  double wet_day_cloud_factor = 0.4;
  double clear_sky_emissivity = 0.78;
  double overcast_emissivity = 0.95;
  double wet_day_diurnal_suppression = 0.5;
  double coldest_day = 15.0;
  double summer_precip_temp_coupling = 0.1;  // per deg C anomaly
  double winter_precip_temp_coupling = 0.05;
  double drought_heat_rate = 0.05;           // index per deg C day above 0
  double drought_dry_day_increment = 0.25;   // index per dry day above 0 deg C
  double drought_precip_relief = 0.5;        // index per mm
};

using AnnualWeather = std::array<DailyWeather, kDaysPerYear>;

/// Noise-free seasonal mean air temperature (deg C) for a day of year.
double seasonal_mean_temp(const SiteParameters& p, double day_of_year,
                          const WeatherModel& model = {});

/// One year of daily weather. Each day consumes exactly four draws (two for
/// the temperature normal, one wet-day test, one amount) whether or not noise
/// is enabled, so the stream position depends only on the number of days.
AnnualWeather generate_annual_weather(const SiteParameters& p, RngStream& rng,
                                      bool temperature_noise = true,
                                      const WeatherModel& model = {});

/// Sub-daily forcing at local solar hour `time_of_day` for a timestep of
/// `timestep_hours`. Pure.
Forcing forcing_at(const DailyWeather& w, const SiteParameters& p, double time_of_day,
                   double timestep_hours = 1.0, const WeatherModel& model = {});

/// Cosine of the solar zenith angle (negative below the horizon).
double cos_solar_zenith(double latitude_deg, int day_of_year, double hour);

/// Saturation vapour pressure over water (kPa) at `temp_c`, and its slope (kPa K-1).
double saturation_vapor_pressure(double temp_c);
double saturation_vapor_pressure_slope(double temp_c);

double update_drought_index(double previous, const DailyWeather& today);

/// CSV dump: doy,mean_temp,amplitude,precip,type
void write_weather_csv(std::ostream& out, const AnnualWeather& weather);

}  // namespace boreal
