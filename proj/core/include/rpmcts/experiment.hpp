#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rpmcts/config.hpp"
#include "rpmcts/records.hpp"
#include "rpmcts/root_parallel.hpp"

namespace rpmcts {

struct EpisodeOptions {
  int workers = 8;
  int trial_budget = 15;
  int extra_trials = 0;  // added per worker, for time-equalized runs
  std::uint64_t master_seed = 0;
  bool record_actions = false;
};

struct EpisodeTrace {
  EpisodeRecord record;
  std::vector<Action> actions;  // filled when record_actions is set
  int fallbacks = 0;            // GPR2P steps that fell back to max
};

/// Seed of the environment's own stream (initial state and real
/// transitions). Shared by every strategy and budget for the same
/// (env, seed), so strategies face identical noise.
std::uint64_t environment_seed(std::uint64_t master_seed, std::string_view env, long long seed);

/// Planner master seed of one (env, strategy, budget, seed) cell.
std::uint64_t planner_seed(std::uint64_t master_seed, std::string_view env, std::string_view strategy,
                           int trial_budget, long long seed);

/// Plays one episode, replanning from scratch at every step.
EpisodeTrace run_episode(const Preset& preset, const Environment& env, StrategyKind strategy,
                         long long seed, const EpisodeOptions& options);

struct ExperimentGrid {
  std::vector<std::string> envs;
  std::vector<StrategyKind> strategies;
  std::vector<int> trial_budgets;  // empty: each preset's schedule
  std::vector<long long> seeds;    // empty: 0 .. preset.seeds-1
  std::optional<int> workers;      // empty: preset value
  std::uint64_t master_seed = 0;
};

using PresetLoader = std::function<Preset(const std::string& env_name)>;

/// Runs every (env, strategy, budget, seed) cell in order, streaming one CSV
/// row per episode to `csv` (flushed per row). Presets are loaded and
/// validated before the first episode; problems surface as ConfigError.
std::vector<EpisodeRecord> run_grid(const ExperimentGrid& grid, const PresetLoader& loader,
                                    const StrategyOverrides& overrides, std::ostream& csv,
                                    std::ostream* progress = nullptr);

/// Aggregate tree-building throughput (trials per second across all
/// workers) measured by planning a few steps from the initial state.
double calibrate_trials_per_second(const Preset& preset, const Environment& env, int trial_budget,
                                   int workers, std::uint64_t master_seed, int repeats = 5);

/// round(inference_seconds_per_step * trials_per_second / workers), >= 0.
int compensation_trials(double inference_seconds_per_step, double trials_per_second, int workers);

struct TimeCompareOptions {
  std::vector<int> trial_budgets;
  std::vector<long long> seeds;
  int workers = 8;
  std::uint64_t master_seed = 0;
};

/// For each budget b: GPR2P at b, then similarity merge at b + delta where
/// delta converts GPR2P's mean per-step inference time into extra trials
/// per worker. Rows carry delta in the delta_trials column.
std::vector<EpisodeRecord> time_equalized_compare(const Preset& preset, const TimeCompareOptions& options,
                                                  std::ostream& csv, std::ostream* progress = nullptr);

}  // namespace rpmcts
