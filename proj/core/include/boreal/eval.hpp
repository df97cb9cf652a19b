#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "boreal/agents.hpp"

namespace boreal {

/// Mean outcome of one policy at one preference.
struct ParetoPoint {
  double carbon = 0.0;
  double thaw = 0.0;
  double preference = 0.0;
  std::string policy_id;
};

/// True when `a` is >= `b` in both objectives and > in at least one.
bool dominates(const ParetoPoint& a, const ParetoPoint& b);

/// Per-point dominated flags, O(n log n).
std::vector<bool> dominated_flags(const std::vector<ParetoPoint>& points);

/// Nondominated subset under component-wise maximization, ordered by carbon
/// return ascending (input order among equal carbon).
std::vector<ParetoPoint> extract_pareto_front(const std::vector<ParetoPoint>& points);

/// Fraction of adjacent preference pairs whose mean carbon return strictly
/// decreases; `carbon_by_lambda` is ordered by ascending carbon weight.
double lambda_monotonicity_violations(const std::vector<double>& carbon_by_lambda);

/// As above from an evaluation record; the preferences must ascend.
double lambda_monotonicity_violations(const EvaluationRecord& record);

/// One point per evaluated preference.
std::vector<ParetoPoint> pareto_points(const EvaluationRecord& record);

inline constexpr int kBaselineActions[2] = {kNoOpAction, 22};

/// Constant-action baselines (no-op and +100 stems/ha at 0.5 conifer) on the
/// same episode indices an agent evaluation uses.
std::vector<EvaluationRecord> run_baselines(const MoTask& task, const std::vector<double>& lambdas,
                                            std::size_t episodes_per_lambda,
                                            std::uint64_t first_episode = 0,
                                            std::size_t workers = 1);

// ---- Artifacts ----

/// policy,lambda,episode,carbon_return,thaw_return,scalarized_return,final_density,final_conifer
void write_tradeoff_csv(std::ostream& out, const std::vector<EvaluationRecord>& records);

/// policy,lambda,episode,step,action,density,conifer_fraction,r_carbon,r_thaw
void write_strategy_csv(std::ostream& out, const std::vector<EvaluationRecord>& records);

/// {"points": [{policy, lambda, carbon, thaw, dominated}], "front": [...]}
void write_pareto_json(std::ostream& out, const std::vector<EvaluationRecord>& records);

/// {"definition": ..., "policies": [{policy, lambdas, mean_carbon, violations, fraction}]}
/// Throws ContractViolation for a preference grid shorter than 2.
void write_monotonicity_json(std::ostream& out, const std::vector<EvaluationRecord>& records);

}  // namespace boreal
