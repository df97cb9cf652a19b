#include "boreal/weather.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "boreal/errors.hpp"

namespace boreal {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDegToRad = std::numbers::pi / 180.0;

double drought_contribution(double mean_temp, double precip, const WeatherModel& m) {
  double c = m.drought_heat_rate * std::max(0.0, mean_temp);
  if (precip <= 0.0 && mean_temp > 0.0) c += m.drought_dry_day_increment;
  c -= m.drought_precip_relief * precip;
  return c;
}

}  // namespace

double seasonal_mean_temp(const SiteParameters& p, double day_of_year, const WeatherModel& model) {
  return p.mean_annual_temp_offset -
         p.seasonal_amplitude * std::cos(kTwoPi * (day_of_year - model.coldest_day) / kDaysPerYear);
}

AnnualWeather generate_annual_weather(const SiteParameters& p, RngStream& rng,
                                      bool temperature_noise, const WeatherModel& model) {
  AnnualWeather year{};
  const double noise_std = temperature_noise ? p.daily_noise_std : 0.0;
  for (int d = 0; d < kDaysPerYear; ++d) {
    DailyWeather& w = year[d];
    w.day_of_year = d + 1;
    const double seasonal = seasonal_mean_temp(p, w.day_of_year, model);
    const double anomaly = noise_std * rng.normal();
    const double u_wet = rng.uniform();
    const double u_amount = rng.uniform();
    w.summer = seasonal >= 0.0;
    w.mean_temp = seasonal + anomaly;

    // Warm anomalies raise convective rain odds in summer and snowfall odds in
    // winter; the symmetric clamp keeps the mean wet-day frequency at the
    // sampled probability.
    double prob;
    double amount;
    if (w.summer) {
      prob = p.summer_rain_prob *
             std::clamp(1.0 + model.summer_precip_temp_coupling * anomaly, 0.5, 1.5);
      amount = p.summer_rain_amount;
    } else {
      prob = p.winter_snow_prob *
             std::clamp(1.0 + model.winter_precip_temp_coupling * anomaly, 0.5, 1.5);
      amount = p.winter_snow_amount;
    }
    const bool wet = u_wet < prob;
    w.precip_amount = wet ? amount * (0.5 + u_amount) : 0.0;
    w.precip_is_snow = wet && w.mean_temp < 0.0;
    w.diurnal_amplitude_today =
        p.diurnal_amplitude * (wet ? model.wet_day_diurnal_suppression : 1.0);
    w.drought_index_contribution = drought_contribution(w.mean_temp, w.precip_amount, model);
  }
  return year;
}

double cos_solar_zenith(double latitude_deg, int day_of_year, double hour) {
  const double decl = 23.44 * kDegToRad * std::sin(kTwoPi * (284.0 + day_of_year) / kDaysPerYear);
  const double lat = latitude_deg * kDegToRad;
  const double hour_angle = 15.0 * kDegToRad * (hour - 12.0);
  return std::sin(lat) * std::sin(decl) + std::cos(lat) * std::cos(decl) * std::cos(hour_angle);
}

double saturation_vapor_pressure(double temp_c) {
  return 0.6108 * std::exp(17.27 * temp_c / (temp_c + 237.3));
}

double saturation_vapor_pressure_slope(double temp_c) {
  const double denom = temp_c + 237.3;
  return 4098.0 * saturation_vapor_pressure(temp_c) / (denom * denom);
}

Forcing forcing_at(const DailyWeather& w, const SiteParameters& p, double time_of_day,
                   double timestep_hours, const WeatherModel& model) {
  require(time_of_day >= 0.0 && time_of_day < 24.0, "forcing_at: time_of_day outside [0, 24)");
  const bool wet = w.precip_amount > 0.0;
  Forcing f;
  const double peak = 12.0 + p.peak_diurnal_hour;
  const double t_c =
      w.mean_temp + 0.5 * w.diurnal_amplitude_today * std::cos(kTwoPi * (time_of_day - peak) / 24.0);
  f.air_temp = t_c + kFreezingK;

  const double cz = cos_solar_zenith(p.latitude, w.day_of_year, time_of_day);
  if (cz > 0.0) {
    f.shortwave_down = model.solar_constant * p.atmospheric_transmissivity * cz *
                       (wet ? model.wet_day_cloud_factor : 1.0);
  }
  const double emissivity = wet ? model.overcast_emissivity : model.clear_sky_emissivity;
  const double t2 = f.air_temp * f.air_temp;
  f.longwave_down = emissivity * kStefanBoltzmann * t2 * t2;
  f.vpd = std::max(0.0, saturation_vapor_pressure(t_c) * (1.0 - p.relative_humidity));
  f.precip_rate = w.precip_amount * timestep_hours / 24.0;
  f.precip_is_snow = w.precip_is_snow;
  return f;
}

double update_drought_index(double previous, const DailyWeather& today) {
  require(previous >= 0.0, "update_drought_index: negative previous index");
  return std::max(0.0, previous + today.drought_index_contribution);
}

void write_weather_csv(std::ostream& out, const AnnualWeather& weather) {
  out << "doy,mean_temp,amplitude,precip,type\n";
  out.precision(17);
  for (const auto& w : weather) {
    out << w.day_of_year << ',' << w.mean_temp << ',' << w.diurnal_amplitude_today << ','
        << w.precip_amount << ',' << (w.precip_amount <= 0.0 ? "none" : w.precip_is_snow ? "snow" : "rain")
        << '\n';
  }
}

}  // namespace boreal
