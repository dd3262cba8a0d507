#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "rpmcts/action_stats.hpp"
#include "rpmcts/mdp.hpp"

namespace rpmcts {

struct DpwParams {
  double d = 1.0;
  double beta = 0.5;
};

struct SearchParams {
  double uct_weight = 1.0;  // C
  double pw_c = 1.0;
  double pw_alpha = 0.5;
  std::optional<DpwParams> dpw;  // absent: plain progressive widening
  int trials = 100;

  void validate() const;
};

/// UCT(s,a) = Q(s,a) + C * sqrt(2 ln N(s) / N(s,a)). Requires edge_visits >= 1.
double uct_score(double q, int edge_visits, int parent_visits, double uct_weight);

/// floor(coeff * visits^exponent). Bounds both |A(s)| and |Succ(a)|.
int widening_allowance(int visits, double coeff, double exponent);

struct Successor {
  std::size_t node = 0;
  double reward = 0.0;
  int count = 0;
};

struct ActionEdge {
  Action action;
  int visits = 0;
  double q = 0.0;  // running mean of backed-up returns
  std::vector<Successor> successors;
};

struct TreeNode {
  StateVec state;
  int visits = 0;  // trials that passed through this node
  bool terminal = false;
  std::vector<ActionEdge> children;
};

/// Single MCTS tree with UCT selection, progressive widening and (optionally)
/// double progressive widening. Confined to one thread.
class SearchTree {
 public:
  /// Called once per edge update with the return backed up through it.
  using BackupObserver = std::function<void(std::size_t node, std::size_t edge, double value)>;

  SearchTree(StateVec root_state, SearchParams params, MdpConfig mdp);

  void run_trial(const Environment& env, Rng& rng);
  void run(const Environment& env, Rng& rng, int trials);

  const TreeNode& root() const { return nodes_.front(); }
  const TreeNode& node(std::size_t index) const { return nodes_.at(index); }
  std::size_t node_count() const { return nodes_.size(); }
  int trials_run() const { return trials_run_; }
  const SearchParams& params() const { return params_; }

  /// (action, Q, N) of every root child in insertion order.
  /// Throws std::runtime_error when the root has no children.
  std::vector<ActionStats> root_action_stats(int tree_index = 0) const;

  void set_backup_observer(BackupObserver observer) { observer_ = std::move(observer); }

 private:
  double simulate(std::size_t node_index, const Environment& env, Rng& rng);
  double rollout(StateVec state, const Environment& env, Rng& rng) const;
  std::size_t select_edge(const TreeNode& node) const;
  std::size_t pick_successor(const ActionEdge& edge, Rng& rng) const;

  SearchParams params_;
  MdpConfig mdp_;
  std::vector<TreeNode> nodes_;
  int trials_run_ = 0;
  BackupObserver observer_;
};

}  // namespace rpmcts
