#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rpmcts/action_stats.hpp"
#include "rpmcts/gpr.hpp"
#include "rpmcts/mdp.hpp"

namespace rpmcts {

enum class StrategyKind {
  kSingleThread,
  kMax,
  kMostVisited,
  kSimilarityVote,
  kSimilarityMerge,
  kGpr2p,
};

/// Canonical order, also the legend/report order.
inline constexpr StrategyKind kAllStrategies[] = {
    StrategyKind::kSimilarityVote, StrategyKind::kSimilarityMerge, StrategyKind::kMax,
    StrategyKind::kMostVisited,    StrategyKind::kGpr2p,           StrategyKind::kSingleThread,
};

std::string_view strategy_name(StrategyKind kind);
std::optional<StrategyKind> parse_strategy(std::string_view name);

/// Which aggregation rule to run, with its hyperparameters.
struct AggregationChoice {
  StrategyKind kind = StrategyKind::kMax;
  double phi = 1.0;                 // vote / merge
  double vote_offset_epsilon = 1.0;  // vote
  gpr::KernelParams kernel;          // gpr2p
  int tau = 1;                       // gpr2p
  std::optional<int> candidate_budget;  // gpr2p, M; unset: default_candidate_budget(D)
  std::uint64_t candidate_seed = 0x5eedULL;

  void validate() const;
};

/// Outcome of one aggregation call.
struct Selection {
  Action action;
  /// GPR2P found no action with visits >= tau and fell back to select_max.
  bool fell_back = false;
  /// GPR2P posterior variance at the chosen action.
  std::optional<double> posterior_variance;
};

class AggregationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argmax Q over every sampled root action; ties go to the lowest
/// (tree_index, insertion order).
Action select_max(const ForestStats& forest);
Action select_most_visited(const ForestStats& forest);

/// K_ij = exp(-phi |a_i - a_j|^2).
Eigen::MatrixXd similarity_matrix(const std::vector<Action>& actions, double phi);

/// One champion (argmax Q) per tree, values shifted positive when any is
/// negative, then argmax of K v.
Action select_similarity_vote(const ForestStats& forest, double phi, double offset_epsilon);

/// kAccumulate sums the similarity-weighted contributions of every other
/// action. kOverwriteLast keeps only the final inner-loop pair, which is what
/// a literal line-by-line reading of the loop produces; it exists so the two
/// readings can be compared in tests.
enum class MergeMode { kAccumulate, kOverwriteLast };

Action select_similarity_merge(const ForestStats& forest, double phi,
                               MergeMode mode = MergeMode::kAccumulate);

/// 1024 candidates for D <= 2, 4096 beyond.
int default_candidate_budget(std::size_t dim);

/// Quasi-uniform candidate points over the box: a Halton sequence with a
/// seeded Cranley-Patterson shift.
std::vector<Action> box_candidates(const ActionBox& box, int count, std::uint64_t seed);

/// GP over visit-filtered root returns, then argmax of the posterior mean
/// over sampled actions plus quasi-uniform candidates.
Selection select_gpr2p(const ForestStats& forest, const AggregationChoice& choice,
                       const ActionBox& box);

/// Dispatches on choice.kind. kSingleThread applies select_max.
Selection aggregate(const ForestStats& forest, const AggregationChoice& choice,
                    const ActionBox& box);

}  // namespace rpmcts
