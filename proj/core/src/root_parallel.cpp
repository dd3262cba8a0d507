#include "rpmcts/root_parallel.hpp"

#include <chrono>
#include <exception>
#include <thread>

namespace rpmcts {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct WorkerOutput {
  std::vector<ActionStats> stats;
  double seconds = 0.0;
  int trials = 0;
  std::exception_ptr error;
};

WorkerOutput run_worker(const StateVec& root_state, const ParallelPlanSpec& spec,
                        const Environment& env, std::uint64_t master_seed, int index) {
  WorkerOutput out;
  const auto start = Clock::now();
  try {
    Rng rng(derive_seed(master_seed, static_cast<std::uint64_t>(index)));
    SearchTree tree(root_state, spec.search, spec.mdp);
    tree.run(env, rng, spec.trials_per_worker);
    out.trials = tree.trials_run();
    out.stats = tree.root_action_stats(index);
  } catch (...) {
    out.error = std::current_exception();
  }
  out.seconds = seconds_since(start);
  return out;
}

void validate(const ParallelPlanSpec& spec) {
  if (spec.workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (spec.trials_per_worker < 1) throw std::invalid_argument("trials per worker must be >= 1");
  spec.search.validate();
  spec.mdp.validate();
  spec.strategy.validate();
}

}  // namespace

ForestStats build_forest_serial(const StateVec& root_state, const ParallelPlanSpec& spec,
                                const Environment& env, std::uint64_t master_seed) {
  validate(spec);
  ForestStats forest;
  for (int w = 0; w < spec.effective_workers(); ++w) {
    WorkerOutput out = run_worker(root_state, spec, env, master_seed, w);
    if (out.error) std::rethrow_exception(out.error);
    forest.per_tree.push_back(std::move(out.stats));
    forest.wall_times.push_back(out.seconds);
  }
  return forest;
}

PlanResult plan_step(const StateVec& root_state, const ParallelPlanSpec& spec,
                     const Environment& env, std::uint64_t master_seed) {
  validate(spec);
  const int workers = spec.effective_workers();
  std::vector<WorkerOutput> outputs(static_cast<std::size_t>(workers));

  const auto build_start = Clock::now();
  {
    std::vector<std::unique_ptr<Environment>> copies;
    copies.reserve(outputs.size());
    for (int w = 0; w < workers; ++w) copies.push_back(env.clone());

    std::vector<std::jthread> threads;
    threads.reserve(outputs.size());
    for (int w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        outputs[static_cast<std::size_t>(w)] =
            run_worker(root_state, spec, *copies[static_cast<std::size_t>(w)], master_seed, w);
      });
    }
  }  // join
  PlanResult result;
  result.timing.build_seconds = seconds_since(build_start);

  for (auto& out : outputs) {
    if (out.error) std::rethrow_exception(out.error);
    result.trials_executed += out.trials;
    result.forest.per_tree.push_back(std::move(out.stats));
    result.forest.wall_times.push_back(out.seconds);
  }

  const auto infer_start = Clock::now();
  try {
    result.selection = aggregate(result.forest, spec.strategy, env.action_box());
  } catch (const std::exception& e) {
    throw AggregationError(std::string(strategy_name(spec.strategy.kind)) + ": " + e.what());
  }
  result.timing.inference_seconds = seconds_since(infer_start);
  return result;
}

}  // namespace rpmcts
