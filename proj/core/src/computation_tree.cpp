#include "gaussbp/computation_tree.hpp"

#include <limits>
#include <stdexcept>
#include <string>

#include "gaussbp/bp.hpp"
#include "gaussbp/error.hpp"

namespace gaussbp {

ComputationTree unwrap_computation_tree(const FactorGraph& g, VariableId root, std::size_t depth) {
  if (root >= g.num_variables()) throw InvalidGraph("unwrap_computation_tree: unknown root " + std::to_string(root));
  constexpr auto kNone = std::numeric_limits<FactorId>::max();

  ComputationTree tree{FactorGraph(g.grid()), {}, {}};
  std::vector<FactorId> arrived_by;  // source factor used to reach each copy

  auto add_copy = [&](VariableId original, std::size_t d, FactorId via) {
    if (tree.origin.size() >= kMaxTreeNodes) {
      throw TreeTooLarge("unwrap_computation_tree: more than " + std::to_string(kMaxTreeNodes) + " nodes");
    }
    const VariableId v = tree.graph.add_variable();
    tree.origin.push_back(original);
    tree.depth.push_back(d);
    arrived_by.push_back(via);
    for (EdgeId e : g.edges_of_variable(original)) {
      const Factor& f = g.factor(g.edge(e).factor);
      if (f.is_unary()) tree.graph.add_unary(v, f.unary().potential);
    }
    return v;
  };

  add_copy(root, 0, kNone);
  // Copies are appended in breadth-first order, so a single index sweep
  // expands level by level.
  for (VariableId v = 0; v < tree.origin.size(); ++v) {
    if (tree.depth[v] == depth) continue;
    const VariableId original = tree.origin[v];
    for (EdgeId e : g.edges_of_variable(original)) {
      const FactorId fid = g.edge(e).factor;
      const Factor& f = g.factor(fid);
      if (f.is_unary() || fid == arrived_by[v]) continue;
      const BinaryFactor& bf = f.binary();
      const bool forward = bf.a == original;
      const VariableId child = add_copy(forward ? bf.b : bf.a, tree.depth[v] + 1, fid);
      if (forward) {
        tree.graph.add_binary(v, child, bf.kernel);
      } else {
        tree.graph.add_binary(child, v, bf.kernel);
      }
    }
  }
  return tree;
}

double check_tree_equivalence(const FactorGraph& g, VariableId root, std::size_t n_iters) {
  if (n_iters < 1) throw std::invalid_argument("check_tree_equivalence: n_iters must be >= 1");
  BpOptions options;
  options.iterations = n_iters;
  options.record_summaries = false;
  const BpResult loopy = run_sync(g, options);
  const ComputationTree tree = unwrap_computation_tree(g, root, n_iters);
  const BpResult unwrapped = run_sync(tree.graph, options);
  return linf_distance(loopy.beliefs[root], unwrapped.beliefs[0]);
}

}  // namespace gaussbp
