#pragma once

#include <cstddef>
#include <vector>

#include "gaussbp/factor_graph.hpp"

namespace gaussbp {

/// Tree of non-reversing walks. Variable 0 is the root; origin[v] is the
/// source-graph variable that tree variable v copies.
struct ComputationTree {
  FactorGraph graph;
  std::vector<VariableId> origin;
  std::vector<std::size_t> depth;
};

/// Unwrapping stops with TreeTooLarge beyond this many variables.
inline constexpr std::size_t kMaxTreeNodes = 1'000'000;

/// Every non-reversing walk of length <= depth from `root` becomes a path
/// in the tree. Each copy carries copies of its original's unary factors,
/// and binary copies keep the source orientation. Throws InvalidGraph for
/// an unknown root and TreeTooLarge past kMaxTreeNodes.
ComputationTree unwrap_computation_tree(const FactorGraph& g, VariableId root, std::size_t depth);

/// L-infinity distance between root beliefs after n_iters synchronous
/// iterations on g and on its depth-n_iters computation tree.
double check_tree_equivalence(const FactorGraph& g, VariableId root, std::size_t n_iters);

}  // namespace gaussbp
