#include <gtest/gtest.h>

#include "boreal/errors.hpp"
#include "boreal/params.hpp"
#include "boreal/sim.hpp"
#include "boreal/stand.hpp"

namespace boreal {
namespace {

StandState uniform_stand(double per_cell, double biomass = 5.0) {
  StandState s;
  for (auto& sp : s.age.stems) sp.fill(per_cell);
  s.biomass_carbon = biomass;
  s.soil_carbon = 10.0;
  return s;
}

TEST(Stand, NoOpLeavesStandUnchanged) {
  const StandState s = default_initial_stand();
  for (double mix : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const auto [out, outcome] = apply_management(s, 0.0, mix);
    EXPECT_EQ(out, s);
    EXPECT_FALSE(outcome.ineffective_thinning);
    EXPECT_FALSE(outcome.ineffective_planting);
    EXPECT_EQ(outcome.removed_carbon, 0.0);
  }
}

TEST(Stand, PlantingAtCapIsIneffective) {
  StandState s;
  s.age.at(Species::kConifer, AgeClass::kMature) = 2000.0;
  const auto [out, outcome] = apply_management(s, 100.0, 0.5);
  EXPECT_EQ(out.age.total(), 2000.0);
  EXPECT_TRUE(outcome.ineffective_planting);
  EXPECT_EQ(outcome.stems_planted, 0.0);
}

TEST(Stand, PlantingAddsSeedlingsAtTargetMixUpToCap) {
  StandState s;
  s.age.at(Species::kDeciduous, AgeClass::kYoung) = 1950.0;
  const auto [out, outcome] = apply_management(s, 100.0, 0.75);
  EXPECT_DOUBLE_EQ(outcome.stems_planted, 50.0);
  EXPECT_DOUBLE_EQ(out.age.at(Species::kConifer, AgeClass::kSeedling), 37.5);
  EXPECT_DOUBLE_EQ(out.age.at(Species::kDeciduous, AgeClass::kSeedling), 12.5);
  EXPECT_FALSE(outcome.ineffective_planting);
}

TEST(Stand, ThinningTakesOldFirstThenYoungerDownToFloor) {
  StandState s;
  s.age.at(Species::kConifer, AgeClass::kOld) = 30.0;
  s.age.at(Species::kConifer, AgeClass::kMature) = 100.0;
  s.age.at(Species::kDeciduous, AgeClass::kYoung) = 60.0;
  s.biomass_carbon = 6.0;
  const double weighted = s.age.weighted_total();
  const auto [out, outcome] = apply_management(s, -100.0, 0.5);
  // 190 stems, floor 150: only 40 removable, 30 old then 10 mature.
  EXPECT_DOUBLE_EQ(outcome.stems_removed, 40.0);
  EXPECT_DOUBLE_EQ(out.age.total(), 150.0);
  EXPECT_EQ(out.age.at(Species::kConifer, AgeClass::kOld), 0.0);
  EXPECT_DOUBLE_EQ(out.age.at(Species::kConifer, AgeClass::kMature), 90.0);
  EXPECT_TRUE(outcome.ineffective_thinning);
  const double removed = 6.0 * (30.0 * kCanopyFactor[4] + 10.0 * kCanopyFactor[3]) / weighted;
  EXPECT_NEAR(outcome.removed_carbon, removed, 1e-12);
  EXPECT_EQ(outcome.hwp_stored, 0.95 * outcome.removed_carbon);
  EXPECT_EQ(outcome.hwp_stored + outcome.harvest_loss, outcome.removed_carbon);
  EXPECT_EQ(out.hwp_carbon_cumulative, outcome.hwp_stored);
}

TEST(Stand, ThinningBelowFloorIsFullyIneffective) {
  StandState s;
  s.age.at(Species::kConifer, AgeClass::kOld) = 120.0;
  s.biomass_carbon = 2.0;
  const auto [out, outcome] = apply_management(s, -50.0, 0.5);
  EXPECT_EQ(out.age, s.age);
  EXPECT_TRUE(outcome.ineffective_thinning);
  EXPECT_EQ(outcome.removed_carbon, 0.0);
}

TEST(Stand, InvalidActionComponentsAreContractViolations) {
  const StandState s = default_initial_stand();
  EXPECT_THROW(apply_management(s, 25.0, 0.5), ContractViolation);
  EXPECT_THROW(apply_management(s, 0.0, 0.3), ContractViolation);
}

TEST(Stand, EmptyStandHasNoCanopy) {
  const PhysicalParams pp = derive_physical_params(StandState{}, default_site_parameters(), 1.0);
  EXPECT_EQ(pp.lai, 0.0);
  EXPECT_EQ(pp.canopy_area_fraction, 0.0);
  EXPECT_EQ(pp.interception_efficiency, 0.0);
}

TEST(Stand, PureConiferLaiApproachesAsymptote) {
  const SiteParameters p = default_site_parameters();
  StandState s;
  s.age.at(Species::kConifer, AgeClass::kMature) = p.max_natural_density;
  const double at_max = derive_physical_params(s, p, 0.0).lai;
  s.age.at(Species::kConifer, AgeClass::kMature) = 1e7;
  const double huge = derive_physical_params(s, p, 0.0).lai;
  EXPECT_LT(at_max, p.max_lai_conifer);
  EXPECT_GT(at_max, 0.7 * p.max_lai_conifer);
  EXPECT_NEAR(huge, p.max_lai_conifer, 1e-3);
}

TEST(Stand, LeaflessDeciduousShowsBareBranchAlbedo) {
  const SiteParameters p = default_site_parameters();
  StandState s;
  s.age.at(Species::kDeciduous, AgeClass::kMature) = 800.0;
  const PhysicalParams pp = derive_physical_params(s, p, 0.0);
  EXPECT_DOUBLE_EQ(pp.canopy_albedo, p.bare_branch_albedo);
  EXPECT_EQ(pp.lai, 0.0);
}

TEST(Stand, ConifersInterceptMore) {
  const SiteParameters p = default_site_parameters();
  StandState c, d;
  c.age.at(Species::kConifer, AgeClass::kMature) = 800.0;
  d.age.at(Species::kDeciduous, AgeClass::kMature) = 800.0;
  const PhysicalParams pc = derive_physical_params(c, p, 1.0), pd = derive_physical_params(d, p, 1.0);
  EXPECT_GT(pc.interception_efficiency / pc.lai, pd.interception_efficiency / pd.lai);
}

TEST(Stand, PhysicalParamsInvariants) {
  const SiteParameters p = default_site_parameters();
  for (double phen : {0.0, 0.3, 1.0}) {
    const PhysicalParams pp = derive_physical_params(default_initial_stand(), p, phen);
    EXPECT_GE(pp.lai, 0.0);
    EXPECT_GE(pp.canopy_albedo, 0.0);
    EXPECT_LE(pp.canopy_albedo, 1.0);
    EXPECT_GE(pp.interception_efficiency, 0.0);
    EXPECT_LE(pp.interception_efficiency, 1.0);
  }
}

TEST(Stand, EmptyStandOnlyRecruits) {
  const SiteParameters p = default_site_parameters();
  RngStream rng(1);
  const auto [out, report] = end_of_year_demography(StandState{}, p, rng);
  EXPECT_EQ(report.mortality_carbon, 0.0);
  EXPECT_EQ(report.stems_died, 0.0);
  EXPECT_GT(report.stems_recruited, 0.0);
  EXPECT_NEAR(out.age.total(), report.stems_recruited, 1e-9);
}

TEST(Stand, SelfThinningRaisesMortalityAtMaxDensity) {
  const SiteParameters p = default_site_parameters();
  EXPECT_GT(mortality_rate(p.max_natural_density, p), p.natural_mortality);
  EXPECT_LT(mortality_rate(100.0, p), mortality_rate(1000.0, p));
}

TEST(Stand, AgingPreservesStems) {
  const AgeDistribution a = uniform_stand(37.0).age;
  EXPECT_NEAR(age_one_year(a).total(), a.total(), 1e-9);
}

TEST(Stand, SeedlingCohortReachesOldClassWithoutMortality) {
  const SiteParameters p = default_site_parameters();
  StandState s;
  s.age.at(Species::kConifer, AgeClass::kSeedling) = 1000.0;
  RngStream rng(1);
  DemographyOptions opt;
  opt.mortality = false;
  opt.recruitment = false;
  for (int y = 0; y < 120; ++y) s = end_of_year_demography(s, p, rng, opt).first;
  EXPECT_GT(s.age.at(Species::kConifer, AgeClass::kOld), 0.0);
  EXPECT_NEAR(s.age.total(), 1000.0, 1e-6);
}

TEST(Stand, DemographyConsumesOneDraw) {
  RngStream rng(4);
  end_of_year_demography(default_initial_stand(), default_site_parameters(), rng);
  EXPECT_EQ(rng.draws(), 1u);
}

TEST(Stand, ConiferFractionOfEmptyStandIsZero) { EXPECT_EQ(AgeDistribution{}.conifer_fraction(), 0.0); }

}  // namespace
}  // namespace boreal
