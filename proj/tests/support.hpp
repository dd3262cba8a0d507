// Independent reference implementations used as test oracles. Deliberately
// naive: no shared code with the library beyond the plain data types.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "rpmcts/action_stats.hpp"
#include "rpmcts/gpr.hpp"

namespace oracle {

using rpmcts::Action;
using rpmcts::ActionStats;
using rpmcts::ForestStats;

inline double sqdist(const Action& a, const Action& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

inline std::vector<ActionStats> all_entries(const ForestStats& f) {
  std::vector<ActionStats> out;
  for (const auto& t : f.per_tree) out.insert(out.end(), t.begin(), t.end());
  return out;
}

inline Action max_q(const ForestStats& f) {
  const auto all = all_entries(f);
  std::size_t best = 0;
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (all[i].q > all[best].q) best = i;
  }
  return all[best].action;
}

inline Action most_visited(const ForestStats& f) {
  const auto all = all_entries(f);
  std::size_t best = 0;
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (all[i].visits > all[best].visits) best = i;
  }
  return all[best].action;
}

inline Action vote(const ForestStats& f, double phi, double eps) {
  std::vector<Action> champ;
  std::vector<double> v;
  for (const auto& t : f.per_tree) {
    if (t.empty()) continue;
    std::size_t b = 0;
    for (std::size_t i = 1; i < t.size(); ++i) {
      if (t[i].q > t[b].q) b = i;
    }
    champ.push_back(t[b].action);
    v.push_back(t[b].q);
  }
  double lo = v[0];
  for (double x : v) lo = x < lo ? x : lo;
  if (lo < 0) {
    for (double& x : v) x = x - lo + eps;
  }
  std::size_t best = 0;
  double best_s = 0.0;
  for (std::size_t i = 0; i < champ.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < champ.size(); ++j) {
      const double k = i == j ? 1.0 : std::exp(-phi * sqdist(champ[i], champ[j]));
      s += k * v[j];
    }
    if (i == 0 || s > best_s) {
      best_s = s;
      best = i;
    }
  }
  return champ[best];
}

inline Action merge(const ForestStats& f, double phi) {
  const auto all = all_entries(f);
  std::size_t best = 0;
  double best_q = 0.0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    double n = all[i].visits;
    double w = all[i].visits * all[i].q;
    for (std::size_t j = 0; j < all.size(); ++j) {
      if (j == i) continue;
      const double k = std::exp(-phi * sqdist(all[i].action, all[j].action));
      n += k * all[j].visits;
      w += k * all[j].visits * all[j].q;
    }
    const double q = w / n;
    if (i == 0 || q > best_q) {
      best_q = q;
      best = i;
    }
  }
  return all[best].action;
}

/// Posterior mean and variance through an explicit inverse of K + (sigma_n^2 + jitter) I.
struct DenseGp {
  Eigen::MatrixXd x;
  Eigen::MatrixXd inv;
  Eigen::VectorXd y;
  rpmcts::gpr::KernelParams p;
  double offset = 0.0;

  double k(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) const {
    return p.signal_variance * std::exp(-(a - b).squaredNorm() / (2.0 * p.length_scale * p.length_scale));
  }

  DenseGp(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets, rpmcts::gpr::KernelParams params,
          double jitter, double prior_mean)
      : x(inputs), y(targets.array() - prior_mean), p(params), offset(prior_mean) {
    const auto n = x.rows();
    Eigen::MatrixXd kk(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) kk(i, j) = k(x.row(i), x.row(j));
      kk(i, i) += p.noise_variance + jitter;
    }
    inv = kk.inverse();
  }

  Eigen::VectorXd cross(const Eigen::RowVectorXd& q) const {
    Eigen::VectorXd c(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) c(i) = k(q, x.row(i));
    return c;
  }
  double mean(const Eigen::RowVectorXd& q) const { return offset + cross(q).dot(inv * y); }
  double variance(const Eigen::RowVectorXd& q) const {
    const auto c = cross(q);
    return std::max(0.0, p.signal_variance - c.dot(inv * c));
  }
};

/// Random forest with up to `max_trees` trees of up to `max_actions`
/// actions. Some actions are duplicated across trees and some q/visit values
/// repeat, so tie rules are exercised.
inline ForestStats random_forest(std::mt19937_64& rng, int max_trees, int max_actions, std::size_t dim) {
  std::uniform_int_distribution<int> trees(1, max_trees), acts(1, max_actions), visits(1, 9), coin(0, 5);
  std::uniform_real_distribution<double> u(-1.0, 1.0), qd(-3.0, 3.0);
  ForestStats f;
  const int k = trees(rng);
  Action last(dim, 0.0);
  for (int t = 0; t < k; ++t) {
    std::vector<ActionStats> tree;
    const int n = acts(rng);
    for (int a = 0; a < n; ++a) {
      Action act(dim);
      for (auto& x : act) x = u(rng);
      if (coin(rng) == 0) act = last;
      double q = qd(rng);
      if (coin(rng) == 0) q = std::round(q);
      tree.push_back(ActionStats{act, q, visits(rng), t});
      last = act;
    }
    f.per_tree.push_back(std::move(tree));
  }
  return f;
}

/// Forest whose actions are distinct points of a 0.05-spaced lattice in
/// [-1, 1]^dim with distinct q values, so exp(-phi d^2) vanishes for large phi.
inline ForestStats lattice_forest(std::mt19937_64& rng, int max_trees, int max_actions, std::size_t dim) {
  std::uniform_int_distribution<int> trees(1, max_trees), acts(1, max_actions), visits(1, 9), cell(0, 40);
  std::uniform_real_distribution<double> qd(-3.0, 3.0);
  std::set<std::vector<int>> used;
  std::set<double> qs;
  ForestStats f;
  const int k = trees(rng);
  for (int t = 0; t < k; ++t) {
    std::vector<ActionStats> tree;
    const int n = acts(rng);
    while (static_cast<int>(tree.size()) < n) {
      std::vector<int> idx(dim);
      for (auto& i : idx) i = cell(rng);
      double q = qd(rng);
      if (!used.insert(idx).second || !qs.insert(q).second) continue;
      Action act(dim);
      for (std::size_t d = 0; d < dim; ++d) act[d] = -1.0 + 0.05 * idx[d];
      tree.push_back(ActionStats{act, q, visits(rng), t});
    }
    f.per_tree.push_back(std::move(tree));
  }
  return f;
}

/// Root-children count after each of `trials` trials when the root expands
/// whenever it has no child or fewer than floor(c T^alpha) children.
inline std::vector<int> widening_trajectory(int trials, double c, double alpha) {
  std::vector<int> out;
  int children = 0;
  for (int t = 1; t <= trials; ++t) {
    const double allowance = std::floor(c * std::pow(static_cast<double>(t), alpha) + 1e-9);
    if (children == 0 || children < allowance) ++children;
    out.push_back(children);
  }
  return out;
}

}  // namespace oracle
