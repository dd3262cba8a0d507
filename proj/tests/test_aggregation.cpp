#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "rpmcts/aggregation.hpp"
#include "support.hpp"

using namespace rpmcts;

namespace {

ForestStats one_tree(std::vector<ActionStats> entries) {
  ForestStats f;
  f.per_tree.push_back(std::move(entries));
  return f;
}

bool in_forest(const ForestStats& f, const Action& a) {
  for (const auto& t : f.per_tree) {
    for (const auto& s : t) {
      if (s.action == a) return true;
    }
  }
  return false;
}

AggregationChoice gpr2p(gpr::KernelParams k, int tau = 1) {
  AggregationChoice c;
  c.kind = StrategyKind::kGpr2p;
  c.kernel = k;
  c.tau = tau;
  return c;
}

const ActionBox kUnit1({0.0}, {1.0});

}  // namespace

TEST_CASE("strategy names round-trip") {
  for (StrategyKind k : kAllStrategies) CHECK(parse_strategy(strategy_name(k)) == k);
  CHECK_FALSE(parse_strategy("best").has_value());
}

TEST_CASE("max and most visited") {
  const auto f = one_tree({{{0.1}, 0.2, 3, 0}, {{0.9}, 0.9, 7, 0}});
  CHECK(select_max(f) == Action{0.9});
  CHECK(select_most_visited(f) == Action{0.9});
  CHECK(select_max(one_tree({{{0.4}, -1.0, 1, 0}})) == Action{0.4});

  const auto ties = one_tree({{{0.1}, 1.0, 4, 0}, {{0.2}, 1.0, 4, 0}});
  CHECK(select_max(ties) == Action{0.1});
  CHECK(select_most_visited(ties) == Action{0.1});

  CHECK_THROWS_AS(select_max(ForestStats{}), AggregationError);
  CHECK_THROWS_AS(select_most_visited(ForestStats{}), AggregationError);
}

TEST_CASE("max and most visited invariances") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    auto f = oracle::random_forest(rng, 8, 6, 2);
    const Action m = select_max(f), v = select_most_visited(f);
    for (auto& t : f.per_tree) {
      for (auto& s : t) s.q = 3.0 * s.q + 10.0;
    }
    CHECK(select_max(f) == m);
    CHECK(select_most_visited(f) == v);
  }
}

TEST_CASE("similarity matrix") {
  const auto k = similarity_matrix({{0.0}, {1.0}, {0.0}}, 5.0);
  CHECK(k(0, 0) == 1.0);
  CHECK(k(0, 2) == 1.0);
  CHECK(k(0, 1) == doctest::Approx(0.006738).epsilon(1e-4));
  CHECK(k(1, 0) == k(0, 1));
  CHECK(similarity_matrix({{0.0}, {1.0}}, 1e6).isIdentity(0.0));
  CHECK_THROWS(similarity_matrix({{0.0}}, 0.0));
}

TEST_CASE("similarity vote") {
  ForestStats single;
  single.per_tree.push_back({{{0.3}, -4.0, 2, 0}, {{0.7}, -2.0, 1, 0}});
  CHECK(select_similarity_vote(single, 1e-3, 1.0) == Action{0.7});
  CHECK(select_similarity_vote(single, 1e3, 1.0) == Action{0.7});

  // Two identical champions reinforce each other against a distant one.
  ForestStats pair;
  pair.per_tree.push_back({{{0.0}, 1.0, 1, 0}});
  pair.per_tree.push_back({{{1.0}, 1.0, 1, 1}});
  pair.per_tree.push_back({{{1.0}, 1.0, 1, 2}});
  CHECK(select_similarity_vote(pair, 100.0, 1.0) == Action{1.0});

  ForestStats sym;
  sym.per_tree.push_back({{{0.0}, 2.0, 1, 0}});
  sym.per_tree.push_back({{{5.0}, 2.0, 1, 1}});
  CHECK(select_similarity_vote(sym, 1.0, 1.0) == Action{0.0});

  CHECK_THROWS_AS(select_similarity_vote(ForestStats{}, 1.0, 1.0), AggregationError);
}

TEST_CASE("similarity vote offset makes every value positive") {
  // With negative champions, a better-valued isolated champion still wins
  // only because values are shifted to be positive before voting.
  ForestStats f;
  f.per_tree.push_back({{{0.0}, -10.0, 1, 0}});
  f.per_tree.push_back({{{0.0}, -10.0, 1, 1}});
  f.per_tree.push_back({{{1.0}, -1.0, 1, 2}});
  // Shifted values: 1, 1, 10. Scores: pair 2, isolated 10.
  CHECK(select_similarity_vote(f, 1e3, 1.0) == Action{1.0});
  // Scaling positive values keeps the argmax.
  ForestStats pos;
  pos.per_tree.push_back({{{0.0}, 1.0, 1, 0}});
  pos.per_tree.push_back({{{0.2}, 2.0, 1, 1}});
  pos.per_tree.push_back({{{0.9}, 2.5, 1, 2}});
  const Action a = select_similarity_vote(pos, 2.0, 1.0);
  for (auto& t : pos.per_tree) t[0].q *= 7.0;
  CHECK(select_similarity_vote(pos, 2.0, 1.0) == a);
}

TEST_CASE("similarity merge hand example") {
  // K_12 = 0.5 requires phi * d^2 = ln 2.
  ForestStats f;
  f.per_tree.push_back({{{0.0}, 1.0, 3, 0}});
  f.per_tree.push_back({{{1.0}, 0.0, 1, 1}});
  const double phi = std::log(2.0);
  CHECK(select_similarity_merge(f, phi) == Action{0.0});
  CHECK(select_similarity_merge(one_tree({{{0.5}, -3.0, 2, 0}}), 1.0) == Action{0.5});
  CHECK_THROWS_AS(select_similarity_merge(ForestStats{}, 1.0), AggregationError);
}

TEST_CASE("similarity merge accumulates rather than overwrites") {
  // a0 is pulled up by a close high-value neighbour listed before a far
  // low-value one. Overwriting keeps only the last neighbour.
  ForestStats f;
  f.per_tree.push_back({{{0.0}, 0.0, 1, 0}, {{0.05}, 5.0, 10, 0}, {{3.0}, -5.0, 1, 0}, {{0.5}, 0.6, 1, 0}});
  const Action acc = select_similarity_merge(f, 1.0, MergeMode::kAccumulate);
  const Action last = select_similarity_merge(f, 1.0, MergeMode::kOverwriteLast);
  CHECK(acc == oracle::merge(f, 1.0));
  CHECK(acc != last);
}

TEST_CASE("aggregators match the naive oracles") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 300; ++i) {
    const std::size_t dim = 1 + static_cast<std::size_t>(i % 3);
    const auto f = oracle::random_forest(rng, 8, 6, dim);
    CHECK(select_max(f) == oracle::max_q(f));
    CHECK(select_most_visited(f) == oracle::most_visited(f));
    CHECK(select_similarity_vote(f, 2.0, 1.0) == oracle::vote(f, 2.0, 1.0));
    CHECK(select_similarity_merge(f, 2.0) == oracle::merge(f, 2.0));
  }
}

TEST_CASE("merge with huge phi equals max") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 300; ++i) {
    const auto f = oracle::lattice_forest(rng, 8, 6, 1 + static_cast<std::size_t>(i % 3));
    CHECK(select_similarity_merge(f, 1e6) == select_max(f));
  }
}

TEST_CASE("sampled-set confinement") {
  std::mt19937_64 rng(29);
  const ActionBox box({-1.0, -1.0}, {1.0, 1.0});
  for (int i = 0; i < 100; ++i) {
    const auto f = oracle::random_forest(rng, 8, 6, 2);
    CHECK(in_forest(f, select_max(f)));
    CHECK(in_forest(f, select_most_visited(f)));
    CHECK(in_forest(f, select_similarity_vote(f, 25.0, 1.0)));
    CHECK(in_forest(f, select_similarity_merge(f, 1.0)));
    const auto s = select_gpr2p(f, gpr2p({0.5, 0.5, 0.1}), box);
    CHECK(box.contains(s.action));
  }
  // A concave profile sampled off its peak: GPR2P proposes an unsampled action.
  const auto f = one_tree({{{0.0}, -0.25, 1, 0}, {{0.2}, -0.09, 1, 0}, {{0.8}, -0.09, 1, 0}, {{1.0}, -0.25, 1, 0}});
  const auto s = select_gpr2p(f, gpr2p({1.0, 0.3, 1e-6}), kUnit1);
  CHECK_FALSE(in_forest(f, s.action));
}

TEST_CASE("gpr2p interpolates the peak of a parabola") {
  const auto f = one_tree({{{0.0}, -0.25, 1, 0}, {{0.2}, -0.09, 1, 0}, {{0.8}, -0.09, 1, 0}, {{1.0}, -0.25, 1, 0}});
  const auto choice = gpr2p({1.0, 0.3, 1e-6});
  const auto s = select_gpr2p(f, choice, kUnit1);
  CHECK_FALSE(s.fell_back);
  REQUIRE(s.posterior_variance.has_value());
  CHECK(*s.posterior_variance >= 0.0);
  CHECK(std::abs(s.action[0] - 0.5) < 0.1);
  const double true_q = -(s.action[0] - 0.5) * (s.action[0] - 0.5);
  CHECK(true_q > -0.09);

  // Grid oracle: the best posterior mean on a fine grid, with the library's
  // choice within a grid spacing of it.
  Eigen::MatrixXd x(4, 1);
  x << 0.0, 0.2, 0.8, 1.0;
  Eigen::VectorXd y(4);
  y << -0.25, -0.09, -0.09, -0.25;
  const auto m = gpr::GpModel::fit(x, y, choice.kernel, gpr::TargetMode::kCentered);
  const oracle::DenseGp ref(x, y, choice.kernel, m.jitter(), m.prior_mean());
  double best_a = 0.0, best_mu = -1e300;
  for (int i = 0; i <= 10000; ++i) {
    Eigen::RowVectorXd q(1);
    q(0) = i / 10000.0;
    const double mu = ref.mean(q);
    if (mu > best_mu) {
      best_mu = mu;
      best_a = q(0);
    }
  }
  CHECK(std::abs(s.action[0] - best_a) < 0.01);
}

TEST_CASE("gpr2p single valid entry returns it") {
  const auto f = one_tree({{{0.3}, 2.0, 5, 0}, {{0.9}, 9.0, 1, 0}});
  const auto s = select_gpr2p(f, gpr2p({1.0, 0.2, 0.1}, 2), kUnit1);
  CHECK_FALSE(s.fell_back);
  CHECK(s.action == Action{0.3});
}

TEST_CASE("gpr2p falls back to max when the filter is empty") {
  const auto f = one_tree({{{0.3}, 2.0, 1, 0}, {{0.9}, 9.0, 2, 0}});
  const auto s = select_gpr2p(f, gpr2p({1.0, 0.2, 0.1}, 10), kUnit1);
  CHECK(s.fell_back);
  CHECK(s.action == Action{0.9});
  CHECK_FALSE(s.posterior_variance.has_value());
}

TEST_CASE("gpr2p validates its parameters") {
  const auto f = one_tree({{{0.3}, 2.0, 1, 0}});
  CHECK_THROWS(select_gpr2p(f, gpr2p({1.0, 0.2, 0.1}, 0), kUnit1));
  CHECK_THROWS(select_gpr2p(f, gpr2p({0.0, 0.2, 0.1}), kUnit1));
  auto c = gpr2p({1.0, 0.2, 0.1});
  c.candidate_budget = 0;
  CHECK_THROWS(select_gpr2p(f, c, kUnit1));
}

TEST_CASE("box candidates") {
  const ActionBox box({-2.0, 0.0}, {2.0, 1.0});
  const auto a = box_candidates(box, 256, 1), b = box_candidates(box, 256, 1), c = box_candidates(box, 256, 2);
  CHECK(a.size() == 256);
  CHECK(a == b);
  CHECK(a != c);
  for (const auto& p : a) CHECK(box.contains(p));
  // Low discrepancy: every quadrant of the box receives close to a quarter.
  int q[4] = {0, 0, 0, 0};
  for (const auto& p : a) q[(p[0] > 0.0 ? 1 : 0) + (p[1] > 0.5 ? 2 : 0)]++;
  for (int n : q) CHECK(std::abs(n - 64) <= 4);
  CHECK(default_candidate_budget(1) == 1024);
  CHECK(default_candidate_budget(2) == 1024);
  CHECK(default_candidate_budget(3) == 4096);
}

TEST_CASE("aggregate dispatch") {
  const auto f = one_tree({{{0.1}, 0.2, 7, 0}, {{0.9}, 0.9, 3, 0}});
  AggregationChoice c;
  c.kind = StrategyKind::kSingleThread;
  CHECK(aggregate(f, c, kUnit1).action == Action{0.9});
  c.kind = StrategyKind::kMostVisited;
  CHECK(aggregate(f, c, kUnit1).action == Action{0.1});
  c.kind = StrategyKind::kSimilarityMerge;
  c.phi = 1e6;
  CHECK(aggregate(f, c, kUnit1).action == Action{0.9});
}
