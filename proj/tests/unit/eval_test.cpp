#include <gtest/gtest.h>

#include <sstream>

#include "boreal/errors.hpp"
#include "boreal/eval.hpp"
#include "json.hpp"
#include "oracles.hpp"

namespace boreal {
namespace {

ParetoPoint pt(double c, double t, std::string id = "p") { return {c, t, 0.0, std::move(id)}; }

TEST(Eval, MonotonicityExamples) {
  EXPECT_DOUBLE_EQ(lambda_monotonicity_violations(std::vector<double>{0.0, 1.0, 0.5, 2.0}), 1.0 / 3.0);
  EXPECT_EQ(lambda_monotonicity_violations(std::vector<double>{-1.0, 0.0, 0.1, 3.0}), 0.0);
  EXPECT_EQ(lambda_monotonicity_violations(std::vector<double>{1.0, 1.0}), 0.0);
}

TEST(Eval, MonotonicityNeedsTwoPreferences) {
  EXPECT_THROW(lambda_monotonicity_violations(std::vector<double>{1.0}), ContractViolation);
}

TEST(Eval, DominanceDefinition) {
  EXPECT_TRUE(dominates(pt(1, 1), pt(1, 0)));
  EXPECT_FALSE(dominates(pt(1, 1), pt(1, 1)));
  EXPECT_FALSE(dominates(pt(2, 0), pt(0, 2)));
}

TEST(Eval, FrontIsSortedByCarbonAndKeepsDuplicates) {
  const std::vector<ParetoPoint> pts{pt(3, 0, "a"), pt(0, 3, "b"), pt(1, 1, "c"), pt(2, 2, "d"),
                                     pt(2, 2, "e"), pt(1, 2, "f")};
  const auto front = extract_pareto_front(pts);
  std::vector<std::string> ids;
  for (const auto& p : front) ids.push_back(p.policy_id);
  EXPECT_EQ(ids, (std::vector<std::string>{"b", "d", "e", "a"}));
}

TEST(Eval, SweepMatchesBruteForce) {
  RngStream rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto pts = testing::random_point_set(rng, 1 + rng.below(60));
    EXPECT_EQ(dominated_flags(pts), testing::brute_force_dominated(pts));
  }
}

TEST(Eval, NonFinitePointsAreRejected) {
  EXPECT_THROW(dominated_flags({pt(std::nan(""), 0)}), ContractViolation);
}

EvaluationRecord synthetic_record(std::vector<double> carbon) {
  EvaluationRecord r;
  r.policy_id = "synthetic";
  for (std::size_t i = 0; i < carbon.size(); ++i) {
    LambdaEvaluation l;
    l.preference = static_cast<double>(i) / static_cast<double>(carbon.size() - 1);
    EpisodeEvaluation e;
    e.carbon_return = carbon[i];
    e.thaw_return = -carbon[i];
    e.trajectory = {{12, {carbon[i], -carbon[i]}, 1000.0, 0.5}};
    l.episodes = {e};
    r.results.push_back(l);
  }
  return r;
}

TEST(Eval, RecordMonotonicityUsesMeanCarbon) {
  EXPECT_DOUBLE_EQ(lambda_monotonicity_violations(synthetic_record({0.0, 1.0, 0.5, 2.0})), 1.0 / 3.0);
  EXPECT_EQ(lambda_monotonicity_violations(synthetic_record({0.0, 0.5, 1.0, 2.0})), 0.0);
}

TEST(Eval, ArtifactsAreWellFormed) {
  const std::vector<EvaluationRecord> recs{synthetic_record({0.0, 1.0, 0.5, 2.0})};
  std::ostringstream tradeoff, strategy, pareto, mono;
  write_tradeoff_csv(tradeoff, recs);
  write_strategy_csv(strategy, recs);
  write_pareto_json(pareto, recs);
  write_monotonicity_json(mono, recs);
  const std::string t = tradeoff.str(), s = strategy.str();
  EXPECT_EQ(std::count(t.begin(), t.end(), '\n'), 5);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 5);
  const auto pj = nlohmann::json::parse(pareto.str());
  EXPECT_EQ(pj["points"].size(), 4u);
  EXPECT_EQ(pj["front"].size(), 4u);
  const auto mj = nlohmann::json::parse(mono.str());
  EXPECT_EQ(mj["policies"][0]["violations"], 1);
  EXPECT_DOUBLE_EQ(mj["policies"][0]["fraction"].get<double>(), 1.0 / 3.0);
}

TEST(Eval, BaselinesShareEpisodeIndices) {
  EpisodeConfig base;
  base.constants.horizon = 2;
  base.sim.dt_minutes = 180;
  ForestTask task(base, 1, 1);
  const auto recs = run_baselines(task, {0.0, 1.0}, 1, 1000000);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].policy_id, "baseline_noop");
  EXPECT_EQ(recs[1].policy_id, "baseline_plant100");
  EXPECT_GT(recs[1].results[0].episodes[0].final_density, recs[0].results[0].episodes[0].final_density);
}

}  // namespace
}  // namespace boreal
