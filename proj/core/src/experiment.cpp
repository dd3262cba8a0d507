#include "rpmcts/experiment.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "rpmcts/metrics.hpp"

namespace rpmcts {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<long long> default_seeds(int count) {
  std::vector<long long> out;
  for (int i = 0; i < count; ++i) out.push_back(i);
  return out;
}

}  // namespace

std::uint64_t environment_seed(std::uint64_t master_seed, std::string_view env, long long seed) {
  return derive_seed(derive_seed(derive_seed(master_seed, "environment"), env),
                     static_cast<std::uint64_t>(seed));
}

std::uint64_t planner_seed(std::uint64_t master_seed, std::string_view env, std::string_view strategy,
                           int trial_budget, long long seed) {
  std::uint64_t s = derive_seed(derive_seed(master_seed, "planner"), env);
  s = derive_seed(s, strategy);
  s = derive_seed(s, static_cast<std::uint64_t>(trial_budget));
  return derive_seed(s, static_cast<std::uint64_t>(seed));
}

EpisodeTrace run_episode(const Preset& preset, const Environment& env, StrategyKind strategy,
                         long long seed, const EpisodeOptions& options) {
  const auto start = Clock::now();
  const std::string_view strategy_label = strategy_name(strategy);

  ParallelPlanSpec spec;
  spec.workers = options.workers;
  spec.trials_per_worker = options.trial_budget + options.extra_trials;
  spec.search = preset.search;
  spec.search.trials = spec.trials_per_worker;
  spec.mdp = preset.mdp;
  spec.strategy = preset.choice_for(strategy, options.trial_budget);

  EpisodeTrace trace;
  EpisodeRecord& rec = trace.record;
  rec.env = std::string(env.name());
  rec.strategy = std::string(strategy_label);
  rec.trial_budget = options.trial_budget;
  rec.seed = seed;

  Rng env_rng(environment_seed(options.master_seed, env.name(), seed));
  const std::uint64_t cell_seed =
      planner_seed(options.master_seed, env.name(), strategy_label, options.trial_budget, seed);

  StateVec state = env.initial_state(env_rng);
  std::vector<double> rewards;
  for (int step = 0; step < preset.mdp.max_episode_steps; ++step) {
    PlanResult plan = plan_step(state, spec, env, derive_seed(cell_seed, static_cast<std::uint64_t>(step)));
    rec.inference_seconds += plan.timing.inference_seconds;
    if (plan.selection.fell_back) ++trace.fallbacks;
    const Action& action = plan.selection.action;
    if (!env.action_box().contains(action)) {
      throw ContractViolation(rec.strategy + " emitted an action outside the action box");
    }
    if (options.record_actions) trace.actions.push_back(action);

    TransitionOutcome out = env.step(state, action, env_rng);
    rewards.push_back(out.reward);
    rec.steps = step + 1;
    if (out.terminal) {
      rec.success = true;
      break;
    }
    state = std::move(out.next_state);
  }
  rec.final_return = discounted_return(rewards, preset.mdp.gamma);
  rec.total_seconds = seconds_since(start);
  return trace;
}

std::vector<EpisodeRecord> run_grid(const ExperimentGrid& grid, const PresetLoader& loader,
                                    const StrategyOverrides& overrides, std::ostream& csv,
                                    std::ostream* progress) {
  if (grid.envs.empty()) throw ConfigError("no environments selected");
  if (grid.strategies.empty()) throw ConfigError("no strategies selected");
  if (grid.workers && *grid.workers < 1) throw ConfigError("workers must be >= 1");
  for (int b : grid.trial_budgets) {
    if (b < 1) throw ConfigError("trial budgets must be positive");
  }

  struct Job {
    Preset preset;
    std::unique_ptr<Environment> env;
    std::vector<int> budgets;
    std::vector<long long> seeds;
  };
  std::vector<Job> jobs;
  std::size_t total = 0;
  for (const auto& name : grid.envs) {
    Job job{loader(name), nullptr, {}, {}};
    overrides.apply(job.preset);
    job.env = job.preset.make_env();
    job.budgets = grid.trial_budgets.empty() ? job.preset.trial_budgets : grid.trial_budgets;
    job.seeds = grid.seeds.empty() ? default_seeds(job.preset.seeds) : grid.seeds;
    for (StrategyKind s : grid.strategies) job.preset.choice_for(s, job.budgets.front()).validate();
    total += job.budgets.size() * job.seeds.size() * grid.strategies.size();
    jobs.push_back(std::move(job));
  }

  write_csv_header(csv);
  csv.flush();
  std::vector<EpisodeRecord> records;
  std::size_t done = 0;
  for (const auto& job : jobs) {
    for (StrategyKind strategy : grid.strategies) {
      for (int budget : job.budgets) {
        for (long long seed : job.seeds) {
          EpisodeOptions opt;
          opt.workers = grid.workers.value_or(job.preset.workers);
          opt.trial_budget = budget;
          opt.master_seed = grid.master_seed;
          EpisodeTrace trace = run_episode(job.preset, *job.env, strategy, seed, opt);
          write_csv_row(csv, trace.record);
          csv.flush();
          ++done;
          if (progress != nullptr) {
            *progress << "[" << done << "/" << total << "] " << trace.record.env << ' '
                      << trace.record.strategy << " trials=" << budget << " seed=" << seed
                      << " steps=" << trace.record.steps << (trace.record.success ? " ok" : " fail");
            if (trace.fallbacks > 0) *progress << " (warning: " << trace.fallbacks << " gpr2p fallbacks)";
            *progress << '\n';
          }
          records.push_back(std::move(trace.record));
        }
      }
    }
  }
  return records;
}

double calibrate_trials_per_second(const Preset& preset, const Environment& env, int trial_budget,
                                   int workers, std::uint64_t master_seed, int repeats) {
  ParallelPlanSpec spec;
  spec.workers = workers;
  spec.trials_per_worker = trial_budget;
  spec.search = preset.search;
  spec.search.trials = trial_budget;
  spec.mdp = preset.mdp;
  spec.strategy = preset.choice_for(StrategyKind::kMax, trial_budget);

  Rng rng(derive_seed(master_seed, "calibration"));
  const StateVec root = env.initial_state(rng);
  long long trials = 0;
  double seconds = 0.0;
  for (int i = 0; i < repeats; ++i) {
    PlanResult plan = plan_step(root, spec, env, derive_seed(master_seed, static_cast<std::uint64_t>(i)));
    trials += plan.trials_executed;
    seconds += plan.timing.build_seconds;
  }
  if (!(seconds > 0.0) || trials == 0) throw std::runtime_error("calibration measured no work");
  return static_cast<double>(trials) / seconds;
}

int compensation_trials(double inference_seconds_per_step, double trials_per_second, int workers) {
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  const double delta = inference_seconds_per_step * trials_per_second / workers;
  return std::max(0, static_cast<int>(std::lround(delta)));
}

std::vector<EpisodeRecord> time_equalized_compare(const Preset& preset, const TimeCompareOptions& options,
                                                  std::ostream& csv, std::ostream* progress) {
  if (options.trial_budgets.empty() || options.seeds.empty()) {
    throw ConfigError("time-compare needs at least one budget and one seed");
  }
  const auto env = preset.make_env();
  write_csv_header(csv, true);
  csv.flush();

  std::vector<EpisodeRecord> out;
  for (int budget : options.trial_budgets) {
    double tps = 0.0;
    try {
      tps = calibrate_trials_per_second(preset, *env, budget, options.workers, options.master_seed);
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("time-compare warmup failed: ") + e.what());
    }

    std::vector<EpisodeRecord> gp_rows;
    for (long long seed : options.seeds) {
      EpisodeOptions opt;
      opt.workers = options.workers;
      opt.trial_budget = budget;
      opt.master_seed = options.master_seed;
      gp_rows.push_back(run_episode(preset, *env, StrategyKind::kGpr2p, seed, opt).record);
    }
    double inference = 0.0;
    double steps = 0.0;
    for (const auto& r : gp_rows) {
      inference += r.inference_seconds;
      steps += r.steps;
    }
    const int delta = compensation_trials(inference / steps, tps, options.workers);
    if (progress != nullptr) {
      *progress << preset.env_name << " trials=" << budget << ": " << tps << " trials/s, gpr2p "
                << inference / steps << " s/step -> merge gets +" << delta << " trials per worker\n";
    }
    for (auto& r : gp_rows) {
      r.delta_trials = delta;
      write_csv_row(csv, r, true);
      out.push_back(r);
    }
    csv.flush();
    for (long long seed : options.seeds) {
      EpisodeOptions opt;
      opt.workers = options.workers;
      opt.trial_budget = budget;
      opt.extra_trials = delta;
      opt.master_seed = options.master_seed;
      EpisodeRecord r = run_episode(preset, *env, StrategyKind::kSimilarityMerge, seed, opt).record;
      r.delta_trials = delta;
      write_csv_row(csv, r, true);
      csv.flush();
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace rpmcts
