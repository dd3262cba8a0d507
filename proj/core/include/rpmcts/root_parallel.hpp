#pragma once

#include <cstdint>

#include "rpmcts/aggregation.hpp"
#include "rpmcts/mcts.hpp"

namespace rpmcts {

struct ParallelPlanSpec {
  int workers = 8;  // forced to 1 for the single-thread strategy
  int trials_per_worker = 15;
  SearchParams search;
  MdpConfig mdp;
  AggregationChoice strategy;

  int effective_workers() const {
    return strategy.kind == StrategyKind::kSingleThread ? 1 : workers;
  }
};

struct PlanTiming {
  double build_seconds = 0.0;      // tree construction, join included
  double inference_seconds = 0.0;  // the aggregation call only
};

struct PlanResult {
  Selection selection;
  PlanTiming timing;
  ForestStats forest;
  long long trials_executed = 0;
};

/// Builds `effective_workers()` independent trees from `root_state`, worker i
/// seeded with derive_seed(master_seed, i), and aggregates their root
/// statistics. Aggregation failures are rethrown as AggregationError naming
/// the strategy.
PlanResult plan_step(const StateVec& root_state, const ParallelPlanSpec& spec,
                     const Environment& env, std::uint64_t master_seed);

/// Tree construction alone, sequentially on the calling thread. Used to
/// estimate trials per second.
ForestStats build_forest_serial(const StateVec& root_state, const ParallelPlanSpec& spec,
                                const Environment& env, std::uint64_t master_seed);

}  // namespace rpmcts
