#include "gaussbp/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace gaussbp {

Grid::Grid(std::size_t n_bins, double min, double max)
    : n_bins_(n_bins), min_(min), max_(max), step_(0.0) {
  if (n_bins < 2) throw std::invalid_argument("Grid: need at least two bins");
  if (!std::isfinite(min) || !std::isfinite(max) || !(max > min)) {
    throw std::invalid_argument("Grid: require finite max > min");
  }
  step_ = (max - min) / static_cast<double>(n_bins - 1);
}

std::size_t Grid::nearest_bin(double x) const noexcept {
  const double pos = std::round((x - min_) / step_);
  if (!(pos > 0.0)) return 0;
  if (pos >= static_cast<double>(n_bins_ - 1)) return n_bins_ - 1;
  return static_cast<std::size_t>(pos);
}

}  // namespace gaussbp
