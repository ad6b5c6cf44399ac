#pragma once

#include <span>
#include <vector>

#include "gaussbp/grid.hpp"
#include "gaussbp/kernel.hpp"

namespace gaussbp {

/// Totals at or below this are treated as a vanished message.
inline constexpr double kUnderflowFloor = 1e-300;

/// Nonnegative mass vector over a Grid. Values are not required to be
/// normalized; every operation below returns a normalized result.
class DiscreteDist {
 public:
  /// Throws GridMismatch when mass.size() != grid.size() and
  /// std::invalid_argument on negative or non-finite entries.
  DiscreteDist(Grid grid, std::vector<double> mass);

  static DiscreteDist uniform(const Grid& grid);
  static DiscreteDist delta(const Grid& grid, std::size_t bin);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> mass() const noexcept { return mass_; }
  double operator[](std::size_t i) const noexcept { return mass_[i]; }
  std::size_t size() const noexcept { return mass_.size(); }
  double total() const noexcept;

  /// Moves the mass vector out, leaving this distribution empty.
  std::vector<double> release() && { return std::move(mass_); }

  friend bool operator==(const DiscreteDist&, const DiscreteDist&) = default;

 private:
  Grid grid_;
  std::vector<double> mass_;
};

/// Throws ZeroMass when the total is <= kUnderflowFloor.
DiscreteDist normalize(const DiscreteDist& d);

/// Pointwise product, normalized. Throws GridMismatch or ZeroMass.
DiscreteDist product(const DiscreteDist& a, const DiscreteDist& b);

/// out[j] ∝ sum_k w_k m[j - offset_k]; sources outside the grid contribute
/// nothing (truncate-and-renormalize, no wrap-around).
DiscreteDist convolve(const DiscreteDist& m, const Kernel& k);

/// mass[i] ∝ exp(-(x_i - mu)^2 / (2 var)). Throws std::invalid_argument for
/// var <= 0 and ZeroMass when mu lies more than 40 sigma outside the grid.
DiscreteDist gaussian_on_grid(double mu, double var, const Grid& grid);

/// Largest absolute bin-wise difference. Grids must match.
double linf_distance(const DiscreteDist& a, const DiscreteDist& b);

/// Kernel placed on a grid: bin (anchor + offset) gets the offset's weight.
/// Offsets falling outside the grid are dropped before normalizing.
DiscreteDist kernel_on_grid(const Kernel& k, const Grid& grid, std::size_t anchor);

}  // namespace gaussbp
