#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rpmcts/config.hpp"
#include "rpmcts/records.hpp"

namespace rpmcts {

struct StepsSummary {
  int n = 0;
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(n)
  double ci_low = 0.0;     // 95% normal approximation
  double ci_high = 0.0;
};

StepsSummary steps_metric(std::span<const double> steps);

/// "Higher is better" plot value: plot_constant - mean steps.
inline double transformed_steps(double mean_steps, double plot_constant) {
  return plot_constant - mean_steps;
}

/// sqrt(se_a^2 + se_b^2)
double pooled_standard_error(const StepsSummary& a, const StepsSummary& b);

struct CellSummary {
  std::string env;
  std::string strategy;
  int trial_budget = 0;
  StepsSummary steps;
  double success_rate = 0.0;  // successes / episodes
  double mean_inference_seconds = 0.0;
  double mean_total_seconds = 0.0;
  double inference_seconds_per_step = 0.0;
};

/// One summary per (env, strategy, budget), ordered by env, budget, then the
/// canonical strategy order.
std::vector<CellSummary> summarize(const std::vector<EpisodeRecord>& records);

/// Strategy ranking inside one (task, trial budget) cell.
struct CellRanking {
  std::string task;
  int trial_budget = 0;
  std::map<std::string, int> ranks;  // strategy -> 1-based rank
};

/// Competition ranking ("1224"): higher score is better, ties share the
/// better rank.
std::map<std::string, int> competition_ranks(const std::vector<std::pair<std::string, double>>& scores);

struct RankTable {
  std::vector<CellRanking> cells;
  std::vector<std::string> strategies;
  std::map<std::string, std::map<std::string, double>> per_task;  // task -> strategy -> MRR
  std::map<std::string, double> overall;                          // mean of per-task MRRs

  std::string to_json() const;
};

/// Reciprocal rank per cell, averaged per task, then across tasks. Throws
/// std::invalid_argument when cells rank different strategy sets.
RankTable mrr(const std::vector<CellRanking>& cells);

/// Ranks every (env, budget) cell by the env's primary metric (fewer steps or
/// higher success rate is better).
std::vector<CellRanking> rank_cells(const std::vector<CellSummary>& summaries,
                                    const std::function<PrimaryMetric(const std::string&)>& metric_for);

}  // namespace rpmcts
