#include "boreal/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "boreal/errors.hpp"
#include "json.hpp"

namespace boreal {

bool dominates(const ParetoPoint& a, const ParetoPoint& b) {
  return a.carbon >= b.carbon && a.thaw >= b.thaw && (a.carbon > b.carbon || a.thaw > b.thaw);
}

std::vector<bool> dominated_flags(const std::vector<ParetoPoint>& points) {
  for (const auto& p : points)
    require(std::isfinite(p.carbon) && std::isfinite(p.thaw), "pareto: non-finite point");
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a].carbon != points[b].carbon) return points[a].carbon > points[b].carbon;
    return points[a].thaw > points[b].thaw;
  });
  std::vector<bool> dominated(points.size(), false);
  double best_thaw_higher_carbon = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    const double carbon = points[order[i]].carbon;
    while (j < order.size() && points[order[j]].carbon == carbon) ++j;
    const double group_best = points[order[i]].thaw;
    for (std::size_t k = i; k < j; ++k) {
      const double t = points[order[k]].thaw;
      dominated[order[k]] = t < group_best || best_thaw_higher_carbon >= t;
    }
    best_thaw_higher_carbon = std::max(best_thaw_higher_carbon, group_best);
    i = j;
  }
  return dominated;
}

std::vector<ParetoPoint> extract_pareto_front(const std::vector<ParetoPoint>& points) {
  const std::vector<bool> dominated = dominated_flags(points);
  std::vector<ParetoPoint> front;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (!dominated[i]) front.push_back(points[i]);
  std::stable_sort(front.begin(), front.end(),
                   [](const ParetoPoint& a, const ParetoPoint& b) { return a.carbon < b.carbon; });
  return front;
}

double lambda_monotonicity_violations(const std::vector<double>& carbon_by_lambda) {
  require(carbon_by_lambda.size() >= 2,
          "lambda monotonicity needs a preference grid of at least 2 values");
  std::size_t violations = 0;
  for (std::size_t i = 1; i < carbon_by_lambda.size(); ++i)
    if (carbon_by_lambda[i] < carbon_by_lambda[i - 1]) ++violations;
  return static_cast<double>(violations) / static_cast<double>(carbon_by_lambda.size() - 1);
}

double lambda_monotonicity_violations(const EvaluationRecord& record) {
  std::vector<double> carbon;
  for (std::size_t i = 0; i < record.results.size(); ++i) {
    if (i > 0)
      require(record.results[i].preference > record.results[i - 1].preference,
              "lambda monotonicity: preferences must ascend");
    carbon.push_back(record.results[i].mean_carbon());
  }
  return lambda_monotonicity_violations(carbon);
}

std::vector<ParetoPoint> pareto_points(const EvaluationRecord& record) {
  std::vector<ParetoPoint> pts;
  for (const auto& r : record.results)
    pts.push_back({r.mean_carbon(), r.mean_thaw(), r.preference, record.policy_id});
  return pts;
}

std::vector<EvaluationRecord> run_baselines(const MoTask& task, const std::vector<double>& lambdas,
                                            std::size_t episodes_per_lambda,
                                            std::uint64_t first_episode, std::size_t workers) {
  std::vector<EvaluationRecord> out;
  for (int a : kBaselineActions) {
    ConstantPolicy policy(a, a == kNoOpAction ? "baseline_noop" : "baseline_plant100");
    out.push_back(evaluate_policy(policy, task, lambdas, episodes_per_lambda, first_episode, workers));
  }
  return out;
}

void write_tradeoff_csv(std::ostream& out, const std::vector<EvaluationRecord>& records) {
  out << "policy,lambda,episode,carbon_return,thaw_return,scalarized_return,final_density,"
         "final_conifer\n";
  for (const auto& rec : records)
    for (const auto& l : rec.results)
      for (std::size_t e = 0; e < l.episodes.size(); ++e) {
        const auto& ep = l.episodes[e];
        out << fmt::format("{},{:.17g},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", rec.policy_id,
                           l.preference, e, ep.carbon_return, ep.thaw_return, ep.scalarized_return,
                           ep.final_density, ep.final_conifer);
      }
}

void write_strategy_csv(std::ostream& out, const std::vector<EvaluationRecord>& records) {
  out << "policy,lambda,episode,step,action,density,conifer_fraction,r_carbon,r_thaw\n";
  for (const auto& rec : records)
    for (const auto& l : rec.results)
      for (std::size_t e = 0; e < l.episodes.size(); ++e)
        for (std::size_t t = 0; t < l.episodes[e].trajectory.size(); ++t) {
          const auto& s = l.episodes[e].trajectory[t];
          out << fmt::format("{},{:.17g},{},{},{},{:.17g},{:.17g},{:.17g},{:.17g}\n", rec.policy_id,
                             l.preference, e, t, s.action, s.density, s.conifer_fraction,
                             s.reward.r_carbon, s.reward.r_thaw);
        }
}

void write_pareto_json(std::ostream& out, const std::vector<EvaluationRecord>& records) {
  std::vector<ParetoPoint> pts;
  for (const auto& rec : records) {
    auto p = pareto_points(rec);
    pts.insert(pts.end(), p.begin(), p.end());
  }
  const std::vector<bool> dominated = dominated_flags(pts);
  nlohmann::ordered_json j;
  j["points"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < pts.size(); ++i)
    j["points"].push_back({{"policy", pts[i].policy_id},
                           {"lambda", pts[i].preference},
                           {"carbon", pts[i].carbon},
                           {"thaw", pts[i].thaw},
                           {"dominated", static_cast<bool>(dominated[i])}});
  j["front"] = nlohmann::ordered_json::array();
  for (const auto& p : extract_pareto_front(pts))
    j["front"].push_back(
        {{"policy", p.policy_id}, {"lambda", p.preference}, {"carbon", p.carbon}, {"thaw", p.thaw}});
  out << j.dump(2) << "\n";
}

void write_monotonicity_json(std::ostream& out, const std::vector<EvaluationRecord>& records) {
  nlohmann::ordered_json j;
  j["definition"] =
      "fraction of adjacent preference pairs whose mean carbon return strictly decreases";
  j["policies"] = nlohmann::ordered_json::array();
  for (const auto& rec : records) {
    nlohmann::ordered_json p;
    p["policy"] = rec.policy_id;
    std::vector<double> lambdas, carbon;
    for (const auto& l : rec.results) {
      lambdas.push_back(l.preference);
      carbon.push_back(l.mean_carbon());
    }
    const double fraction = lambda_monotonicity_violations(rec);
    p["lambdas"] = lambdas;
    p["mean_carbon"] = carbon;
    p["violations"] = static_cast<long>(std::lround(fraction * static_cast<double>(lambdas.size() - 1)));
    p["fraction"] = fraction;
    j["policies"].push_back(std::move(p));
  }
  out << j.dump(2) << "\n";
}

}  // namespace boreal
