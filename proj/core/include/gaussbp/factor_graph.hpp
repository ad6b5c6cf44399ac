#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "gaussbp/distribution.hpp"
#include "gaussbp/grid.hpp"
#include "gaussbp/kernel.hpp"

namespace gaussbp {

using VariableId = std::size_t;
using FactorId = std::size_t;
using EdgeId = std::size_t;

struct UnaryFactor {
  VariableId target;
  DiscreteDist potential;
};

/// Pairwise potential g(x_b - x_a) on a shift-invariant kernel.
struct BinaryFactor {
  VariableId a;
  VariableId b;
  Kernel kernel;
};

struct Factor {
  FactorId id;
  std::variant<UnaryFactor, BinaryFactor> kind;

  bool is_unary() const noexcept { return std::holds_alternative<UnaryFactor>(kind); }
  const UnaryFactor& unary() const { return std::get<UnaryFactor>(kind); }
  const BinaryFactor& binary() const { return std::get<BinaryFactor>(kind); }
};

struct VariableNode {
  VariableId id;
  std::optional<FactorId> prior;  ///< first unary factor attached, if any
};

/// One (factor, variable) incidence. Messages live on these in both
/// directions.
struct Edge {
  FactorId factor;
  VariableId variable;
};

/// Bipartite graph of scalar variables and unary/binary factors, all on one
/// Grid. Built incrementally, then treated as immutable.
class FactorGraph {
 public:
  explicit FactorGraph(Grid grid) : grid_(grid) {}

  VariableId add_variable();
  void add_variables(std::size_t count);

  /// Throws BadPrior for an unknown target, GridMismatch for a potential on
  /// another grid.
  FactorId add_unary(VariableId target, DiscreteDist potential);

  /// Throws InvalidGraph when a == b or either id is unknown.
  FactorId add_binary(VariableId a, VariableId b, Kernel kernel);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t num_variables() const noexcept { return variables_.size(); }
  std::size_t num_factors() const noexcept { return factors_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  std::size_t num_unary() const noexcept { return num_unary_; }
  std::size_t num_binary() const noexcept { return factors_.size() - num_unary_; }

  const VariableNode& variable(VariableId v) const { return variables_.at(v); }
  const Factor& factor(FactorId f) const { return factors_.at(f); }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  std::span<const VariableNode> variables() const noexcept { return variables_; }
  std::span<const Factor> factors() const noexcept { return factors_; }

  /// Edges incident to a variable, in insertion order.
  std::span<const EdgeId> edges_of_variable(VariableId v) const { return var_edges_.at(v); }
  /// Edges of a factor: one for unary, {a-side, b-side} for binary.
  std::span<const EdgeId> edges_of_factor(FactorId f) const { return factor_edges_.at(f); }

  /// Edge joining factor f and variable v. Throws InvalidGraph if absent.
  EdgeId edge_between(FactorId f, VariableId v) const;

  /// Variable-degree: number of incident factors.
  std::size_t degree(VariableId v) const { return var_edges_.at(v).size(); }

  /// Re-checks every structural invariant; throws InvalidGraph.
  void validate() const;

  /// True when the binary factors form a forest (union-find).
  bool is_forest() const;

  /// Unordered neighbour lists over binary factors.
  std::vector<std::vector<VariableId>> variable_adjacency() const;

 private:
  Grid grid_;
  std::vector<VariableNode> variables_;
  std::vector<Factor> factors_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> var_edges_;
  std::vector<std::vector<EdgeId>> factor_edges_;
  std::size_t num_unary_ = 0;
};

/// Hop distance from every variable to the nearest variable carrying a
/// unary factor, over binary factors. Unreachable variables get SIZE_MAX.
std::vector<std::size_t> distance_to_nearest_prior(const FactorGraph& g);

}  // namespace gaussbp
