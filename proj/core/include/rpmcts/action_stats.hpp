#pragma once

#include <cstddef>
#include <vector>

#include "rpmcts/mdp.hpp"

namespace rpmcts {

/// Root statistics of one sampled action in one tree.
struct ActionStats {
  Action action;
  double q = 0.0;
  int visits = 0;
  int tree_index = 0;
};

/// Root statistics of every tree built for one planning step.
struct ForestStats {
  std::vector<std::vector<ActionStats>> per_tree;
  std::vector<double> wall_times;  // seconds, one per tree

  std::size_t total_actions() const {
    std::size_t n = 0;
    for (const auto& tree : per_tree) n += tree.size();
    return n;
  }
  bool empty() const { return total_actions() == 0; }
};

}  // namespace rpmcts
