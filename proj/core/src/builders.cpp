#include "gaussbp/builders.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "gaussbp/error.hpp"
#include "gaussbp/random.hpp"

namespace gaussbp {

DiscreteDist random_potential(const RandomPotentialSpec& spec, const Grid& grid) {
  if (spec.width_bins == 0 || spec.width_bins > grid.size()) {
    throw std::invalid_argument("random_potential: width_bins must be in 1..n_bins");
  }
  Rng rng(spec.seed);
  std::vector<double> mass(grid.size(), 0.0);
  const std::size_t start = grid.midpoint() >= spec.width_bins / 2 ? grid.midpoint() - spec.width_bins / 2 : 0;
  const std::size_t first = std::min(start, grid.size() - spec.width_bins);
  for (std::size_t i = 0; i < spec.width_bins; ++i) mass[first + i] = rng.uniform_open_closed();
  return normalize(DiscreteDist(grid, std::move(mass)));
}

Kernel random_kernel(std::size_t width_bins, std::uint64_t seed) {
  if (width_bins == 0) throw std::invalid_argument("random_kernel: width must be positive");
  Rng rng(seed);
  const int w = static_cast<int>(width_bins);
  std::vector<int> offsets(width_bins);
  std::vector<double> weights(width_bins);
  for (int i = 0; i < w; ++i) {
    offsets[static_cast<std::size_t>(i)] = i - w / 2;
    weights[static_cast<std::size_t>(i)] = rng.uniform_open_closed();
  }
  return Kernel(std::move(offsets), std::move(weights));
}

std::vector<double> prior_shape_weights(PriorShape shape, std::size_t width_bins) {
  if (width_bins == 0) throw std::invalid_argument("prior_shape_weights: width must be positive");
  std::vector<double> w(width_bins, 1.0);
  if (shape == PriorShape::SkewBump) {
    for (std::size_t i = 0; i < width_bins; ++i) {
      const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(width_bins);
      w[i] = t * std::pow(1.0 - t, 4);
    }
  }
  return w;
}

DiscreteDist shaped_window(PriorShape shape, std::size_t width_bins, std::ptrdiff_t start, const Grid& grid) {
  const auto weights = prior_shape_weights(shape, width_bins);
  std::vector<double> mass(grid.size(), 0.0);
  for (std::size_t i = 0; i < width_bins; ++i) {
    const std::ptrdiff_t bin = start + static_cast<std::ptrdiff_t>(i);
    if (bin >= 0 && bin < static_cast<std::ptrdiff_t>(grid.size())) mass[static_cast<std::size_t>(bin)] = weights[i];
  }
  return normalize(DiscreteDist(grid, std::move(mass)));
}

KernelSpec KernelSpec::fixed_kernel(Kernel k) {
  KernelSpec s;
  s.kind = Kind::Fixed;
  s.fixed = std::move(k);
  return s;
}

KernelSpec KernelSpec::random(std::size_t width_bins, std::uint64_t seed) {
  KernelSpec s;
  s.kind = Kind::Random;
  s.width_bins = width_bins;
  s.seed = seed;
  return s;
}

KernelSpec KernelSpec::gaussian(double sigma_bins) {
  KernelSpec s;
  s.kind = Kind::Gaussian;
  s.sigma_bins = sigma_bins;
  return s;
}

Kernel KernelSpec::make(std::size_t index) const {
  switch (kind) {
    case Kind::Fixed:
      return fixed;
    case Kind::Random:
      return random_kernel(width_bins, derive_seed(seed, index));
    case Kind::Gaussian:
      return Kernel::gaussian(sigma_bins);
  }
  throw std::logic_error("KernelSpec: unknown kind");
}

namespace {

void attach_priors(FactorGraph& g, const PriorList& priors) {
  for (const auto& [v, dist] : priors) {
    if (v >= g.num_variables()) throw BadPrior("prior targets nonexistent variable " + std::to_string(v));
    g.add_unary(v, dist);
  }
}

}  // namespace

FactorGraph build_chain(std::size_t n_vars, const PriorList& priors, const KernelSpec& kernels, const Grid& grid) {
  if (n_vars < 2) throw std::invalid_argument("build_chain: need at least two variables");
  FactorGraph g(grid);
  g.add_variables(n_vars);
  for (std::size_t i = 0; i + 1 < n_vars; ++i) g.add_binary(i, i + 1, kernels.make(i));
  attach_priors(g, priors);
  return g;
}

std::size_t tree_leaf_count(std::size_t depth, std::size_t branching) {
  std::size_t leaves = 1;
  for (std::size_t d = 0; d < depth; ++d) leaves *= branching;
  return leaves;
}

FactorGraph build_tree(std::size_t depth, std::size_t branching, const std::vector<DiscreteDist>& leaf_priors,
                       const KernelSpec& kernels, const Grid& grid) {
  if (depth < 1 || branching < 2) throw std::invalid_argument("build_tree: need depth >= 1 and branching >= 2");
  const std::size_t leaves = tree_leaf_count(depth, branching);
  if (!leaf_priors.empty() && leaf_priors.size() != leaves) {
    throw BadPrior("build_tree: expected " + std::to_string(leaves) + " leaf priors");
  }
  FactorGraph g(grid);
  g.add_variable();
  std::vector<VariableId> level{0};
  std::size_t factor_index = 0;
  for (std::size_t d = 0; d < depth; ++d) {
    std::vector<VariableId> next;
    next.reserve(level.size() * branching);
    for (VariableId parent : level) {
      for (std::size_t c = 0; c < branching; ++c) {
        const VariableId child = g.add_variable();
        g.add_binary(parent, child, kernels.make(factor_index++));
        next.push_back(child);
      }
    }
    level = std::move(next);
  }
  for (std::size_t i = 0; i < leaf_priors.size(); ++i) g.add_unary(level[i], leaf_priors[i]);
  return g;
}

FactorGraph build_star(std::size_t n_outer, const std::vector<DiscreteDist>& outer_priors, const KernelSpec& kernels,
                       const Grid& grid) {
  if (n_outer < 2) throw std::invalid_argument("build_star: need at least two outer variables");
  if (outer_priors.size() != n_outer) throw BadPrior("build_star: need one prior per outer variable");
  FactorGraph g(grid);
  g.add_variables(n_outer + 1);
  for (std::size_t i = 1; i <= n_outer; ++i) {
    g.add_binary(i, 0, kernels.make(i - 1));
    g.add_unary(i, outer_priors[i - 1]);
  }
  return g;
}

FactorGraph build_grid_graph(std::size_t rows, std::size_t cols, const PriorList& priors, const KernelSpec& kernels,
                             const Grid& grid, const EdgeMask& edge_mask) {
  if (rows == 0 || cols == 0 || rows * cols < 2) throw std::invalid_argument("build_grid_graph: need rows*cols >= 2");
  FactorGraph g(grid);
  g.add_variables(rows * cols);
  std::size_t factor_index = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const VariableId v = r * cols + c;
      if (c + 1 < cols && !edge_mask.contains(unordered(v, v + 1))) g.add_binary(v, v + 1, kernels.make(factor_index++));
      if (r + 1 < rows && !edge_mask.contains(unordered(v, v + cols))) {
        g.add_binary(v, v + cols, kernels.make(factor_index++));
      }
    }
  }
  attach_priors(g, priors);
  return g;
}

}  // namespace gaussbp
