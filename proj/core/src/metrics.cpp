#include "rpmcts/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>

#include "json.hpp"
#include "rpmcts/aggregation.hpp"

namespace rpmcts {

namespace {

constexpr double kZ95 = 1.959963984540054;

int strategy_order(const std::string& name) {
  int i = 0;
  for (StrategyKind k : kAllStrategies) {
    if (strategy_name(k) == name) return i;
    ++i;
  }
  return i;
}

}  // namespace

StepsSummary steps_metric(std::span<const double> steps) {
  StepsSummary s;
  s.n = static_cast<int>(steps.size());
  if (steps.empty()) throw std::invalid_argument("steps_metric: no records");
  double sum = 0.0;
  for (double v : steps) sum += v;
  s.mean = sum / s.n;
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : steps) ss += (v - s.mean) * (v - s.mean);
    s.std_error = std::sqrt(ss / (s.n - 1)) / std::sqrt(static_cast<double>(s.n));
  }
  s.ci_low = s.mean - kZ95 * s.std_error;
  s.ci_high = s.mean + kZ95 * s.std_error;
  return s;
}

double pooled_standard_error(const StepsSummary& a, const StepsSummary& b) {
  return std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
}

std::vector<CellSummary> summarize(const std::vector<EpisodeRecord>& records) {
  using Key = std::tuple<std::string, int, int, std::string>;
  std::map<Key, std::vector<const EpisodeRecord*>> groups;
  for (const auto& r : records) {
    groups[{r.env, r.trial_budget, strategy_order(r.strategy), r.strategy}].push_back(&r);
  }
  std::vector<CellSummary> out;
  for (const auto& [key, rows] : groups) {
    CellSummary c;
    c.env = std::get<0>(key);
    c.trial_budget = std::get<1>(key);
    c.strategy = std::get<3>(key);
    std::vector<double> steps;
    double successes = 0.0;
    double inference = 0.0;
    double total = 0.0;
    double step_count = 0.0;
    for (const auto* r : rows) {
      steps.push_back(r->steps);
      successes += r->success ? 1.0 : 0.0;
      inference += r->inference_seconds;
      total += r->total_seconds;
      step_count += r->steps;
    }
    const double n = static_cast<double>(rows.size());
    c.steps = steps_metric(steps);
    c.success_rate = successes / n;
    c.mean_inference_seconds = inference / n;
    c.mean_total_seconds = total / n;
    c.inference_seconds_per_step = step_count > 0 ? inference / step_count : 0.0;
    out.push_back(std::move(c));
  }
  return out;
}

std::map<std::string, int> competition_ranks(const std::vector<std::pair<std::string, double>>& scores) {
  std::map<std::string, int> ranks;
  for (const auto& [name, score] : scores) {
    int better = 0;
    for (const auto& other : scores) {
      if (other.second > score) ++better;
    }
    ranks[name] = better + 1;
  }
  return ranks;
}

RankTable mrr(const std::vector<CellRanking>& cells) {
  if (cells.empty()) throw std::invalid_argument("mrr: no ranked cells");
  RankTable table;
  table.cells = cells;
  std::set<std::string> reference;
  for (const auto& [name, rank] : cells.front().ranks) reference.insert(name);
  for (const auto& cell : cells) {
    std::set<std::string> names;
    for (const auto& [name, rank] : cell.ranks) {
      if (rank < 1) throw std::invalid_argument("mrr: ranks are 1-based");
      names.insert(name);
    }
    if (names != reference) {
      throw std::invalid_argument("mrr: cell " + cell.task + "/" + std::to_string(cell.trial_budget) +
                                  " ranks a different strategy set");
    }
  }
  table.strategies.assign(reference.begin(), reference.end());
  std::sort(table.strategies.begin(), table.strategies.end(),
            [](const std::string& a, const std::string& b) {
              return std::make_pair(strategy_order(a), a) < std::make_pair(strategy_order(b), b);
            });

  std::map<std::string, std::map<std::string, std::pair<double, int>>> sums;
  for (const auto& cell : cells) {
    for (const auto& [name, rank] : cell.ranks) {
      auto& acc = sums[cell.task][name];
      acc.first += 1.0 / rank;
      acc.second += 1;
    }
  }
  for (const auto& [task, per_strategy] : sums) {
    for (const auto& [name, acc] : per_strategy) table.per_task[task][name] = acc.first / acc.second;
  }
  for (const auto& name : table.strategies) {
    double total = 0.0;
    for (const auto& [task, values] : table.per_task) total += values.at(name);
    table.overall[name] = total / static_cast<double>(table.per_task.size());
  }
  return table;
}

std::string RankTable::to_json() const {
  nlohmann::ordered_json j;
  j["strategies"] = strategies;
  auto& cell_array = j["cells"] = nlohmann::ordered_json::array();
  for (const auto& c : cells) {
    nlohmann::ordered_json cj;
    cj["task"] = c.task;
    cj["trial_budget"] = c.trial_budget;
    for (const auto& s : strategies) {
      cj["ranks"][s] = c.ranks.at(s);
      cj["rr"][s] = 1.0 / c.ranks.at(s);
    }
    cell_array.push_back(std::move(cj));
  }
  for (const auto& [task, values] : per_task) {
    for (const auto& s : strategies) j["mrr_per_task"][task][s] = values.at(s);
  }
  for (const auto& s : strategies) j["mrr_overall"][s] = overall.at(s);
  return j.dump(2);
}

std::vector<CellRanking> rank_cells(const std::vector<CellSummary>& summaries,
                                    const std::function<PrimaryMetric(const std::string&)>& metric_for) {
  std::map<std::pair<std::string, int>, std::vector<std::pair<std::string, double>>> cells;
  for (const auto& s : summaries) {
    const double score =
        metric_for(s.env) == PrimaryMetric::kSteps ? -s.steps.mean : s.success_rate;
    cells[{s.env, s.trial_budget}].emplace_back(s.strategy, score);
  }
  std::vector<CellRanking> out;
  for (const auto& [key, scores] : cells) {
    out.push_back(CellRanking{key.first, key.second, competition_ranks(scores)});
  }
  return out;
}

}  // namespace rpmcts
