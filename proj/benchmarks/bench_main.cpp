#include <benchmark/benchmark.h>

#include "rpmcts/aggregation.hpp"
#include "rpmcts/config.hpp"
#include "rpmcts/gpr.hpp"
#include "rpmcts/root_parallel.hpp"

using namespace rpmcts;

namespace {

ForestStats random_forest(int trees, int actions, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> visits(1, 6);
  ForestStats forest;
  for (int t = 0; t < trees; ++t) {
    std::vector<ActionStats> tree;
    for (int a = 0; a < actions; ++a) {
      Action act(dim);
      for (auto& x : act) x = u(rng);
      tree.push_back(ActionStats{act, -5.0 + u(rng), visits(rng), t});
    }
    forest.per_tree.push_back(std::move(tree));
  }
  return forest;
}

ActionBox unit_box(std::size_t dim) {
  return ActionBox(std::vector<double>(dim, -1.0), std::vector<double>(dim, 1.0));
}

void BM_GpFit(benchmark::State& state) {
  const auto n = state.range(0);
  Rng rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = u(rng);
    x(i, 1) = u(rng);
    y(i) = u(rng);
  }
  const gpr::KernelParams params{0.284, 2.61, 0.899};
  for (auto _ : state) {
    benchmark::DoNotOptimize(gpr::GpModel::fit(x, y, params, gpr::TargetMode::kCentered));
  }
}
BENCHMARK(BM_GpFit)->Arg(16)->Arg(64)->Arg(128);

void BM_GpPosteriorBatch(benchmark::State& state) {
  const auto forest = random_forest(8, 11, 2, 2);
  Eigen::MatrixXd x(88, 2);
  Eigen::VectorXd y(88);
  Eigen::Index i = 0;
  for (const auto& tree : forest.per_tree) {
    for (const auto& s : tree) {
      x(i, 0) = s.action[0];
      x(i, 1) = s.action[1];
      y(i++) = s.q;
    }
  }
  const auto model = gpr::GpModel::fit(x, y, {0.284, 2.61, 0.899}, gpr::TargetMode::kCentered);
  Eigen::MatrixXd queries = Eigen::MatrixXd::Random(state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(model.posterior_mean_batch(queries));
}
BENCHMARK(BM_GpPosteriorBatch)->Arg(1024)->Arg(4096);

void BM_Aggregate(benchmark::State& state) {
  const auto kind = static_cast<StrategyKind>(state.range(0));
  const auto forest = random_forest(8, static_cast<int>(state.range(1)), 2, 3);
  AggregationChoice choice;
  choice.kind = kind;
  choice.phi = 1.0;
  choice.kernel = {0.284, 2.61, 0.899};
  const ActionBox box = unit_box(2);
  state.SetLabel(std::string(strategy_name(kind)));
  for (auto _ : state) benchmark::DoNotOptimize(aggregate(forest, choice, box));
}
BENCHMARK(BM_Aggregate)
    ->ArgsProduct({{static_cast<long>(StrategyKind::kMax), static_cast<long>(StrategyKind::kSimilarityVote),
                    static_cast<long>(StrategyKind::kSimilarityMerge), static_cast<long>(StrategyKind::kGpr2p)},
                   {4, 11}});

void BM_PlanStep(benchmark::State& state) {
  const Preset preset = load_preset(default_preset_dir(), "narrow_corridor");
  const auto env = preset.make_env();
  Rng rng(4);
  const StateVec root = env->initial_state(rng);
  ParallelPlanSpec spec;
  spec.workers = 8;
  spec.trials_per_worker = static_cast<int>(state.range(0));
  spec.search = preset.search;
  spec.mdp = preset.mdp;
  spec.strategy = preset.choice_for(StrategyKind::kSimilarityMerge, spec.trials_per_worker);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(plan_step(root, spec, *env, seed++));
}
BENCHMARK(BM_PlanStep)->Arg(15)->Arg(60)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
