#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "gaussbp/distribution.hpp"
#include "gaussbp/factor_graph.hpp"
#include "gaussbp/kernel.hpp"

namespace gaussbp {

/// A window of i.i.d. uniform(0,1] heights, `width_bins` wide.
struct RandomPotentialSpec {
  std::size_t width_bins = 16;
  std::uint64_t seed = 42;
};

/// Random window centered on the grid midpoint (bins mid - w/2 .. mid - w/2 + w - 1),
/// zero elsewhere, normalized. Draws come from Rng (mt19937_64) seeded with
/// spec.seed, so the mass is bit-identical across platforms.
DiscreteDist random_potential(const RandomPotentialSpec& spec, const Grid& grid);

/// Random kernel on offsets -w/2 .. w - w/2 - 1 with i.i.d. uniform(0,1]
/// weights. The mean is deliberately left as drawn.
Kernel random_kernel(std::size_t width_bins, std::uint64_t seed);

/// Bounded prior shapes for the prior-strength sweep.
enum class PriorShape {
  Box,       ///< flat over the window
  SkewBump,  ///< t (1 - t)^4 on the window, t in (0, 1): smooth, skewed, bounded
};

/// Unnormalized shape weights for a window of `width_bins` bins.
std::vector<double> prior_shape_weights(PriorShape shape, std::size_t width_bins);

/// Places a shaped window with its first bin at `start` (may hang off the
/// grid; the overhang is dropped).
DiscreteDist shaped_window(PriorShape shape, std::size_t width_bins, std::ptrdiff_t start, const Grid& grid);

/// How builders obtain one kernel per binary factor.
struct KernelSpec {
  enum class Kind { Fixed, Random, Gaussian };

  Kind kind = Kind::Random;
  Kernel fixed = Kernel::delta(0);
  std::size_t width_bins = 12;
  double sigma_bins = 1.0;
  std::uint64_t seed = 42;

  static KernelSpec fixed_kernel(Kernel k);
  static KernelSpec random(std::size_t width_bins, std::uint64_t seed);
  static KernelSpec gaussian(double sigma_bins);

  /// Kernel for the index-th binary factor a builder creates. Random kernels
  /// use derive_seed(seed, index).
  Kernel make(std::size_t index) const;
};

using PriorList = std::vector<std::pair<VariableId, DiscreteDist>>;

/// x0 - x1 - ... - x_{n-1}; factor i joins (i, i+1). Throws
/// std::invalid_argument for n < 2 and BadPrior for out-of-range targets.
FactorGraph build_chain(std::size_t n_vars, const PriorList& priors, const KernelSpec& kernels, const Grid& grid);

/// Complete `branching`-ary tree of the given depth, variables numbered in
/// breadth-first order (root = 0). leaf_priors[i] goes to the i-th leaf.
FactorGraph build_tree(std::size_t depth, std::size_t branching, const std::vector<DiscreteDist>& leaf_priors,
                       const KernelSpec& kernels, const Grid& grid);

/// Number of leaves of a complete tree: branching^depth.
std::size_t tree_leaf_count(std::size_t depth, std::size_t branching);

/// Center 0 without a prior; outer variables 1..n_outer, each with
/// outer_priors[i-1] and a factor (outer -> center).
FactorGraph build_star(std::size_t n_outer, const std::vector<DiscreteDist>& outer_priors, const KernelSpec& kernels,
                       const Grid& grid);

/// Unordered variable pair.
using EdgeMask = std::set<std::pair<VariableId, VariableId>>;

/// Canonical (min, max) ordering for EdgeMask entries.
inline std::pair<VariableId, VariableId> unordered(VariableId a, VariableId b) {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

/// 4-connected lattice, variable id = row * cols + col. Horizontal factor
/// (r,c)->(r,c+1) is created before the vertical (r,c)->(r+1,c) for each
/// cell, row-major, skipping pairs listed in `edge_mask`.
FactorGraph build_grid_graph(std::size_t rows, std::size_t cols, const PriorList& priors, const KernelSpec& kernels,
                             const Grid& grid, const EdgeMask& edge_mask = {});

}  // namespace gaussbp
