#include <gtest/gtest.h>

#include "boreal/energy.hpp"
#include "boreal/errors.hpp"
#include "boreal/hydro.hpp"

namespace boreal {
namespace {

Forcing snowfall(double mm) {
  Forcing f;
  f.precip_rate = mm;
  f.precip_is_snow = true;
  return f;
}

TEST(Hydro, NoCanopyMeansNoInterception) {
  const WaterState w = partition_precipitation(snowfall(10.0), PhysicalParams{}, WaterState{});
  EXPECT_EQ(w.swe_canopy, 0.0);
  EXPECT_EQ(w.swe_ground, 10.0);
}

TEST(Hydro, FullCanopyStoreLetsSnowThrough) {
  PhysicalParams pp;
  pp.interception_efficiency = 0.4;
  pp.canopy_snow_capacity = 5.0;
  WaterState w;
  w.swe_canopy = 5.0;
  const WaterState out = partition_precipitation(snowfall(10.0), pp, w);
  EXPECT_EQ(out.swe_canopy, 5.0);
  EXPECT_EQ(out.swe_ground, 10.0);
}

TEST(Hydro, PartitionArithmetic) {
  PhysicalParams pp;
  pp.interception_efficiency = 0.4;
  pp.canopy_snow_capacity = 5.0;
  const WaterState out = partition_precipitation(snowfall(10.0), pp, WaterState{});
  EXPECT_DOUBLE_EQ(out.swe_canopy, 4.0);
  EXPECT_DOUBLE_EQ(out.swe_ground, 6.0);
  EXPECT_EQ(out.precip_total, 10.0);
}

TEST(Hydro, RainOnSnowRefreezesUnlessDisabled) {
  Forcing rain;
  rain.precip_rate = 3.0;
  WaterState w;
  w.swe_ground = 10.0;
  EXPECT_EQ(partition_precipitation(rain, PhysicalParams{}, w).swe_ground, 13.0);
  HydroOptions opt;
  opt.rain_on_snow_refreezes = false;
  EXPECT_EQ(partition_precipitation(rain, PhysicalParams{}, w, opt).swc, 3.0);
}

TEST(Hydro, NegativePrecipitationIsContractViolation) {
  Forcing f;
  f.precip_rate = -1.0;
  EXPECT_THROW(partition_precipitation(f, PhysicalParams{}, WaterState{}), ContractViolation);
}

TEST(Hydro, ZeroEnergiesLeaveWaterUnchanged) {
  WaterState w;
  w.swe_ground = 3.0;
  w.swe_canopy = 1.0;
  w.swc = 50.0;
  EXPECT_EQ(apply_melt_and_et(w, 0.0, 0.0, 0.0, 0.0, 3600.0, default_site_parameters()).water, w);
}

TEST(Hydro, MeltIntoFullSoilBecomesRunoff) {
  const SiteParameters p = default_site_parameters();
  WaterState w;
  w.swc = p.max_water_content;
  w.swe_ground = 20.0;
  const double energy = 5.0 * kLatentHeatFusion / 3600.0;
  const WaterState out = apply_melt_and_et(w, 0.0, energy, 0.0, 0.0, 3600.0, p).water;
  EXPECT_NEAR(out.runoff_total, 5.0, 1e-12);
  EXPECT_NEAR(out.swe_ground, 15.0, 1e-12);
  EXPECT_EQ(out.swc, p.max_water_content);
}

TEST(Hydro, MeltAndEtAreLimitedByStores) {
  const SiteParameters p = default_site_parameters();
  WaterState w;
  w.swe_canopy = 0.1;
  w.swc = 0.2;
  const MeltEtResult r = apply_melt_and_et(w, 1e6, 1e6, 1e6, 1e6, 3600.0, p);
  EXPECT_EQ(r.water.swe_canopy, 0.0);
  EXPECT_EQ(r.water.swe_ground, 0.0);
  EXPECT_EQ(r.water.swc, 0.0);
  EXPECT_NEAR(r.et, 0.3, 1e-15);
}

TEST(Hydro, YearOfRandomStepsClosesLedger) {
  const SiteParameters p = default_site_parameters();
  RngStream rng(77);
  PhysicalParams pp;
  pp.interception_efficiency = 0.3;
  pp.canopy_snow_capacity = 2.0;
  WaterState w;
  w.swc = 90.0;
  const double start = w.storage();
  for (int step = 0; step < 365 * 24; ++step) {
    Forcing f;
    f.precip_rate = rng.uniform() < 0.1 ? rng.uniform(0.0, 3.0) : 0.0;
    f.precip_is_snow = rng.uniform() < 0.5;
    w = partition_precipitation(f, pp, w);
    w = apply_melt_and_et(w, rng.uniform(0.0, 50.0), rng.uniform(0.0, 50.0), rng.uniform(0.0, 150.0),
                          rng.uniform(0.0, 80.0), 3600.0, p)
            .water;
    ASSERT_GE(w.swc, 0.0);
    ASSERT_LE(w.swc, p.max_water_content);
  }
  const double residual = w.precip_total - (w.storage() - start + w.et_total + w.runoff_total);
  EXPECT_LT(std::abs(residual), 1e-6 * (w.precip_total + start));
}

}  // namespace
}  // namespace boreal
