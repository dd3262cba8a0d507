#include "rpmcts/aggregation.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace rpmcts {

namespace {

struct NamedStrategy {
  StrategyKind kind;
  std::string_view name;
};

constexpr std::array<NamedStrategy, 6> kNames{{
    {StrategyKind::kSingleThread, "single_thread"},
    {StrategyKind::kMax, "max"},
    {StrategyKind::kMostVisited, "most_visited"},
    {StrategyKind::kSimilarityVote, "similarity_vote"},
    {StrategyKind::kSimilarityMerge, "similarity_merge"},
    {StrategyKind::kGpr2p, "gpr2p"},
}};

void require_nonempty(const ForestStats& forest) {
  if (forest.empty()) throw AggregationError("no sampled actions in forest");
}

double squared_distance(const Action& a, const Action& b) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return d2;
}

// Flattened view in (tree_index, insertion) order.
std::vector<const ActionStats*> flatten(const ForestStats& forest) {
  std::vector<const ActionStats*> out;
  out.reserve(forest.total_actions());
  for (const auto& tree : forest.per_tree) {
    for (const auto& s : tree) out.push_back(&s);
  }
  return out;
}

template <typename Key>
Action select_by(const ForestStats& forest, Key key) {
  require_nonempty(forest);
  const ActionStats* best = nullptr;
  double best_key = -std::numeric_limits<double>::infinity();
  for (const auto* s : flatten(forest)) {
    const double k = key(*s);
    if (best == nullptr || k > best_key) {
      best = s;
      best_key = k;
    }
  }
  return best->action;
}

constexpr std::array<int, 12> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

double radical_inverse(std::uint64_t index, int base) {
  double inv_base = 1.0 / base;
  double factor = inv_base;
  double result = 0.0;
  while (index > 0) {
    result += static_cast<double>(index % base) * factor;
    index /= base;
    factor *= inv_base;
  }
  return result;
}

}  // namespace

std::string_view strategy_name(StrategyKind kind) {
  for (const auto& n : kNames) {
    if (n.kind == kind) return n.name;
  }
  return "unknown";
}

std::optional<StrategyKind> parse_strategy(std::string_view name) {
  for (const auto& n : kNames) {
    if (n.name == name) return n.kind;
  }
  return std::nullopt;
}

void AggregationChoice::validate() const {
  switch (kind) {
    case StrategyKind::kSimilarityVote:
      if (!(vote_offset_epsilon >= 0.0)) throw std::invalid_argument("vote offset epsilon must be >= 0");
      [[fallthrough]];
    case StrategyKind::kSimilarityMerge:
      if (!(phi > 0.0)) throw std::invalid_argument("phi must be > 0");
      break;
    case StrategyKind::kGpr2p:
      kernel.validate();
      if (tau < 1) throw std::invalid_argument("tau must be a positive integer");
      if (candidate_budget && *candidate_budget < 1) throw std::invalid_argument("candidate budget must be positive");
      break;
    default:
      break;
  }
}

Action select_max(const ForestStats& forest) {
  return select_by(forest, [](const ActionStats& s) { return s.q; });
}

Action select_most_visited(const ForestStats& forest) {
  return select_by(forest, [](const ActionStats& s) { return static_cast<double>(s.visits); });
}

Eigen::MatrixXd similarity_matrix(const std::vector<Action>& actions, double phi) {
  if (!(phi > 0.0)) throw std::invalid_argument("phi must be > 0");
  const auto n = static_cast<Eigen::Index>(actions.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      k(i, j) = k(j, i) = std::exp(-phi * squared_distance(actions[i], actions[j]));
    }
  }
  return k;
}

Action select_similarity_vote(const ForestStats& forest, double phi, double offset_epsilon) {
  require_nonempty(forest);
  std::vector<Action> champions;
  std::vector<double> values;
  for (const auto& tree : forest.per_tree) {
    if (tree.empty()) continue;
    const ActionStats* best = &tree.front();
    for (const auto& s : tree) {
      if (s.q > best->q) best = &s;
    }
    champions.push_back(best->action);
    values.push_back(best->q);
  }

  double lowest = values.front();
  for (double v : values) lowest = std::min(lowest, v);
  if (lowest < 0.0) {
    for (double& v : values) v += -lowest + offset_epsilon;
  }

  const Eigen::MatrixXd k = similarity_matrix(champions, phi);
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < champions.size(); ++i) {
    double score = 0.0;
    for (std::size_t j = 0; j < champions.size(); ++j) {
      score += k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * values[j];
    }
    if (i == 0 || score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return champions[best];
}

Action select_similarity_merge(const ForestStats& forest, double phi, MergeMode mode) {
  require_nonempty(forest);
  if (!(phi > 0.0)) throw std::invalid_argument("phi must be > 0");
  const auto all = flatten(forest);
  const std::size_t n = all.size();

  std::size_t best = 0;
  double best_q = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double ni = all[i]->visits;
    const double own = ni * all[i]->q;
    double n_sim = ni;
    double weighted = own;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double kij = std::exp(-phi * squared_distance(all[i]->action, all[j]->action));
      const double nj = kij * all[j]->visits;
      if (mode == MergeMode::kAccumulate) {
        n_sim += nj;
        weighted += nj * all[j]->q;
      } else {
        n_sim = ni + nj;
        weighted = own + nj * all[j]->q;
      }
    }
    const double q_sim = weighted / n_sim;
    if (i == 0 || q_sim > best_q) {
      best_q = q_sim;
      best = i;
    }
  }
  return all[best]->action;
}

int default_candidate_budget(std::size_t dim) { return dim <= 2 ? 1024 : 4096; }

std::vector<Action> box_candidates(const ActionBox& box, int count, std::uint64_t seed) {
  const std::size_t dim = box.dim();
  if (dim > kPrimes.size()) throw std::invalid_argument("candidate generation supports D <= 12");
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> shift(dim);
  for (auto& s : shift) s = unit(rng);

  std::vector<Action> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    Action a(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      double u = radical_inverse(static_cast<std::uint64_t>(i) + 1, kPrimes[d]) + shift[d];
      u -= std::floor(u);
      a[d] = box.low()[d] + u * (box.high()[d] - box.low()[d]);
    }
    out.push_back(std::move(a));
  }
  return out;
}

Selection select_gpr2p(const ForestStats& forest, const AggregationChoice& choice,
                       const ActionBox& box) {
  require_nonempty(forest);
  choice.validate();

  std::vector<const ActionStats*> valid;
  for (const auto* s : flatten(forest)) {
    if (s->visits >= choice.tau) valid.push_back(s);
  }
  if (valid.empty()) return Selection{select_max(forest), true, std::nullopt};

  const std::size_t dim = box.dim();
  const auto n = static_cast<Eigen::Index>(valid.size());
  Eigen::MatrixXd inputs(n, static_cast<Eigen::Index>(dim));
  Eigen::VectorXd targets(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = *valid[static_cast<std::size_t>(i)];
    if (s.action.size() != dim) throw AggregationError("gpr2p: action dimension mismatch");
    for (std::size_t d = 0; d < dim; ++d) inputs(i, static_cast<Eigen::Index>(d)) = s.action[d];
    targets(i) = s.q;
  }
  const auto model = gpr::GpModel::fit(inputs, std::move(targets), choice.kernel,
                                       gpr::TargetMode::kCentered);

  // Sampled actions first so that exact ties resolve to a sampled action.
  const auto grid = box_candidates(box, choice.candidate_budget.value_or(default_candidate_budget(dim)),
                                    choice.candidate_seed);
  Eigen::MatrixXd candidates(n + static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(dim));
  candidates.topRows(n) = inputs;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (std::size_t d = 0; d < dim; ++d) {
      candidates(n + static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(d)) = grid[g][d];
    }
  }
  const Eigen::VectorXd mean = model.posterior_mean_batch(candidates);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < mean.size(); ++i) {
    if (mean(i) > mean(best)) best = i;
  }

  Action chosen(dim);
  for (std::size_t d = 0; d < dim; ++d) chosen[d] = candidates(best, static_cast<Eigen::Index>(d));
  chosen = box.clamp(chosen);
  const double variance = model.posterior_variance(chosen);
  return Selection{std::move(chosen), false, variance};
}

Selection aggregate(const ForestStats& forest, const AggregationChoice& choice,
                    const ActionBox& box) {
  switch (choice.kind) {
    case StrategyKind::kSingleThread:
    case StrategyKind::kMax:
      return Selection{select_max(forest), false, std::nullopt};
    case StrategyKind::kMostVisited:
      return Selection{select_most_visited(forest), false, std::nullopt};
    case StrategyKind::kSimilarityVote:
      return Selection{select_similarity_vote(forest, choice.phi, choice.vote_offset_epsilon), false,
                       std::nullopt};
    case StrategyKind::kSimilarityMerge:
      return Selection{select_similarity_merge(forest, choice.phi), false, std::nullopt};
    case StrategyKind::kGpr2p:
      return select_gpr2p(forest, choice, box);
  }
  throw AggregationError("unknown aggregation strategy");
}

}  // namespace rpmcts
