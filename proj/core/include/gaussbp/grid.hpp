#pragma once

#include <cstddef>

namespace gaussbp {

/// Uniformly spaced bin centers on [min, max]; the shared discretization of
/// every non-parametric message and belief.
class Grid {
 public:
  /// Throws std::invalid_argument unless n_bins >= 2 and max > min.
  Grid(std::size_t n_bins, double min, double max);

  std::size_t size() const noexcept { return n_bins_; }
  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }
  double step() const noexcept { return step_; }

  double center(std::size_t bin) const noexcept {
    return min_ + static_cast<double>(bin) * step_;
  }

  /// Bin whose center is closest to x, clamped into the grid.
  std::size_t nearest_bin(double x) const noexcept;

  /// Index of the middle bin (n_bins / 2).
  std::size_t midpoint() const noexcept { return n_bins_ / 2; }

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.n_bins_ == b.n_bins_ && a.min_ == b.min_ && a.max_ == b.max_;
  }

 private:
  std::size_t n_bins_;
  double min_;
  double max_;
  double step_;
};

}  // namespace gaussbp
