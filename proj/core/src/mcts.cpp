#include "rpmcts/mcts.hpp"

#include <cmath>
#include <stdexcept>

namespace rpmcts {

void SearchParams::validate() const {
  if (!(uct_weight >= 0.0)) throw std::invalid_argument("uct weight C must be >= 0");
  if (!(pw_c > 0.0)) throw std::invalid_argument("pw_c must be > 0");
  if (!(pw_alpha > 0.0 && pw_alpha < 1.0)) throw std::invalid_argument("pw_alpha must lie in (0, 1)");
  if (dpw) {
    if (!(dpw->d > 0.0)) throw std::invalid_argument("dpw_d must be > 0");
    if (!(dpw->beta > 0.0 && dpw->beta < 1.0)) {
      throw std::invalid_argument("dpw_beta must lie in (0, 1)");
    }
  }
  if (trials <= 0) throw std::invalid_argument("trials must be positive");
}

double uct_score(double q, int edge_visits, int parent_visits, double uct_weight) {
  if (edge_visits < 1 || parent_visits < 1) {
    throw ContractViolation("uct_score needs N(s,a) >= 1 and N(s) >= 1");
  }
  return q + uct_weight * std::sqrt(2.0 * std::log(static_cast<double>(parent_visits)) /
                                    static_cast<double>(edge_visits));
}

int widening_allowance(int visits, double coeff, double exponent) {
  if (visits <= 0) return 0;
  // The small slack keeps exact integer products (e.g. 5 * 32^0.2 == 10)
  // from flooring one short due to pow() roundoff.
  const double raw = coeff * std::pow(static_cast<double>(visits), exponent);
  return static_cast<int>(std::floor(raw + 1e-9));
}

SearchTree::SearchTree(StateVec root_state, SearchParams params, MdpConfig mdp)
    : params_(params), mdp_(mdp) {
  params_.validate();
  mdp_.validate();
  if (!all_finite(root_state)) throw ContractViolation("root state has non-finite entries");
  nodes_.push_back(TreeNode{std::move(root_state), 0, false, {}});
}

void SearchTree::run_trial(const Environment& env, Rng& rng) {
  simulate(0, env, rng);
  ++trials_run_;
}

void SearchTree::run(const Environment& env, Rng& rng, int trials) {
  for (int i = 0; i < trials; ++i) run_trial(env, rng);
}

std::size_t SearchTree::select_edge(const TreeNode& node) const {
  std::size_t best = 0;
  double best_score = uct_score(node.children[0].q, node.children[0].visits, node.visits,
                                params_.uct_weight);
  for (std::size_t i = 1; i < node.children.size(); ++i) {
    const auto& edge = node.children[i];
    const double score = uct_score(edge.q, edge.visits, node.visits, params_.uct_weight);
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

std::size_t SearchTree::pick_successor(const ActionEdge& edge, Rng& rng) const {
  int total = 0;
  for (const auto& s : edge.successors) total += s.count;
  std::uniform_int_distribution<int> draw(0, total - 1);
  int ticket = draw(rng);
  for (std::size_t i = 0; i < edge.successors.size(); ++i) {
    ticket -= edge.successors[i].count;
    if (ticket < 0) return i;
  }
  return edge.successors.size() - 1;
}

double SearchTree::rollout(StateVec state, const Environment& env, Rng& rng) const {
  const ActionBox& box = env.action_box();
  double total = 0.0;
  double discount = 1.0;
  for (int depth = 0; depth < mdp_.rollout_depth; ++depth) {
    const Action action = box.sample_uniform(rng);
    TransitionOutcome out = env.step(state, action, rng);
    total += discount * out.reward;
    discount *= mdp_.gamma;
    if (out.terminal) return total;
    state = std::move(out.next_state);
  }
  return total + discount * env.leaf_value(state);
}

double SearchTree::simulate(std::size_t node_index, const Environment& env, Rng& rng) {
  // nodes_ may reallocate below; only indices survive across push_back.
  nodes_[node_index].visits += 1;
  if (nodes_[node_index].terminal) return 0.0;

  const int node_visits = nodes_[node_index].visits;
  const auto allowance =
      static_cast<std::size_t>(widening_allowance(node_visits, params_.pw_c, params_.pw_alpha));
  std::size_t edge_index;
  if (nodes_[node_index].children.empty() || nodes_[node_index].children.size() < allowance) {
    nodes_[node_index].children.push_back(ActionEdge{env.action_box().sample_uniform(rng), 0, 0.0, {}});
    edge_index = nodes_[node_index].children.size() - 1;
  } else {
    edge_index = select_edge(nodes_[node_index]);
  }

  ActionEdge* edge = &nodes_[node_index].children[edge_index];
  edge->visits += 1;

  bool fresh = edge->successors.empty();
  if (!fresh && params_.dpw) {
    const auto succ_allowance = static_cast<std::size_t>(
        widening_allowance(edge->visits, params_.dpw->d, params_.dpw->beta));
    fresh = edge->successors.size() < succ_allowance;
  }

  double value;
  double reward;
  std::size_t successor_slot;
  if (fresh) {
    TransitionOutcome out = env.step(nodes_[node_index].state, edge->action, rng);
    reward = out.reward;
    const std::size_t child = nodes_.size();
    const bool terminal = out.terminal;
    StateVec next = out.next_state;
    nodes_.push_back(TreeNode{std::move(out.next_state), 1, terminal, {}});
    edge = &nodes_[node_index].children[edge_index];
    edge->successors.push_back(Successor{child, reward, 0});
    successor_slot = edge->successors.size() - 1;
    value = terminal ? 0.0 : rollout(std::move(next), env, rng);
  } else {
    successor_slot = params_.dpw ? pick_successor(*edge, rng) : 0;
    const Successor succ = edge->successors[successor_slot];
    reward = succ.reward;
    value = simulate(succ.node, env, rng);
    edge = &nodes_[node_index].children[edge_index];
  }

  const double ret = reward + mdp_.gamma * value;
  edge->successors[successor_slot].count += 1;
  edge->q += (ret - edge->q) / static_cast<double>(edge->visits);
  if (observer_) observer_(node_index, edge_index, ret);
  return ret;
}

std::vector<ActionStats> SearchTree::root_action_stats(int tree_index) const {
  const TreeNode& r = root();
  if (r.children.empty()) throw std::runtime_error("no sampled actions");
  std::vector<ActionStats> out;
  out.reserve(r.children.size());
  for (const auto& edge : r.children) {
    out.push_back(ActionStats{edge.action, edge.q, edge.visits, tree_index});
  }
  return out;
}

}  // namespace rpmcts
