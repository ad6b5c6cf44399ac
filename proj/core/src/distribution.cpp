#include "gaussbp/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gaussbp/error.hpp"

namespace gaussbp {

namespace {

void require_same_grid(const Grid& a, const Grid& b, const char* op) {
  if (!(a == b)) throw GridMismatch(std::string(op) + ": distributions live on different grids");
}

DiscreteDist normalized_from(const Grid& grid, std::vector<double> mass, const char* op) {
  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  if (!(total > kUnderflowFloor)) throw ZeroMass(std::string(op) + ": total mass vanished");
  const double inv = 1.0 / total;
  for (double& m : mass) m *= inv;
  return DiscreteDist(grid, std::move(mass));
}

}  // namespace

DiscreteDist::DiscreteDist(Grid grid, std::vector<double> mass)
    : grid_(grid), mass_(std::move(mass)) {
  if (mass_.size() != grid_.size()) {
    throw GridMismatch("DiscreteDist: mass has " + std::to_string(mass_.size()) +
                       " entries but the grid has " + std::to_string(grid_.size()) + " bins");
  }
  for (double m : mass_) {
    if (!std::isfinite(m) || m < 0.0) {
      throw std::invalid_argument("DiscreteDist: mass entries must be finite and >= 0");
    }
  }
}

DiscreteDist DiscreteDist::uniform(const Grid& grid) {
  return DiscreteDist(grid, std::vector<double>(grid.size(), 1.0 / static_cast<double>(grid.size())));
}

DiscreteDist DiscreteDist::delta(const Grid& grid, std::size_t bin) {
  if (bin >= grid.size()) throw std::out_of_range("DiscreteDist::delta: bin outside grid");
  std::vector<double> mass(grid.size(), 0.0);
  mass[bin] = 1.0;
  return DiscreteDist(grid, std::move(mass));
}

double DiscreteDist::total() const noexcept {
  return std::accumulate(mass_.begin(), mass_.end(), 0.0);
}

DiscreteDist normalize(const DiscreteDist& d) {
  return normalized_from(d.grid(), std::vector<double>(d.mass().begin(), d.mass().end()), "normalize");
}

DiscreteDist product(const DiscreteDist& a, const DiscreteDist& b) {
  require_same_grid(a.grid(), b.grid(), "product");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return normalized_from(a.grid(), std::move(out), "product");
}

DiscreteDist convolve(const DiscreteDist& m, const Kernel& k) {
  const auto n = static_cast<std::ptrdiff_t>(m.size());
  const auto src = m.mass();
  std::vector<double> out(m.size(), 0.0);
  for (std::size_t t = 0; t < k.size(); ++t) {
    const std::ptrdiff_t shift = k.offsets()[t];
    const double w = k.weights()[t];
    // out[j] += w * src[j - shift] over the overlap of both index ranges.
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, shift);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n, n + shift);
    for (std::ptrdiff_t j = lo; j < hi; ++j) out[j] += w * src[j - shift];
  }
  return normalized_from(m.grid(), std::move(out), "convolve");
}

DiscreteDist gaussian_on_grid(double mu, double var, const Grid& grid) {
  if (!(var > 0.0) || !std::isfinite(var) || !std::isfinite(mu)) {
    throw std::invalid_argument("gaussian_on_grid: need finite mu and var > 0");
  }
  const double sigma = std::sqrt(var);
  const double outside = std::max({grid.min() - mu, mu - grid.max(), 0.0});
  if (outside > 40.0 * sigma) throw ZeroMass("gaussian_on_grid: mean lies more than 40 sigma outside the grid");

  // Work relative to the closest bin so the largest weight is exp(0).
  const double anchor = grid.center(grid.nearest_bin(mu));
  const double ref = -(anchor - mu) * (anchor - mu) / (2.0 * var);
  std::vector<double> mass(grid.size());
  for (std::size_t i = 0; i < mass.size(); ++i) {
    const double d = grid.center(i) - mu;
    mass[i] = std::exp(-d * d / (2.0 * var) - ref);
  }
  return normalized_from(grid, std::move(mass), "gaussian_on_grid");
}

double linf_distance(const DiscreteDist& a, const DiscreteDist& b) {
  require_same_grid(a.grid(), b.grid(), "linf_distance");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

DiscreteDist kernel_on_grid(const Kernel& k, const Grid& grid, std::size_t anchor) {
  std::vector<double> mass(grid.size(), 0.0);
  for (std::size_t t = 0; t < k.size(); ++t) {
    const auto bin = static_cast<std::ptrdiff_t>(anchor) + k.offsets()[t];
    if (bin >= 0 && bin < static_cast<std::ptrdiff_t>(grid.size())) mass[bin] = k.weights()[t];
  }
  return normalized_from(grid, std::move(mass), "kernel_on_grid");
}

}  // namespace gaussbp
