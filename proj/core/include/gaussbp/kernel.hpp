#pragma once

#include <span>
#include <vector>

namespace gaussbp {

/// Shift-invariant pairwise potential g(x_b - x_a), stored as normalized
/// weights on signed bin offsets.
class Kernel {
 public:
  /// Offsets must be strictly increasing and the weights nonnegative with a
  /// positive sum; the weights are normalized on construction.
  Kernel(std::vector<int> offsets, std::vector<double> weights);

  /// Point mass at one offset.
  static Kernel delta(int offset = 0);

  /// Zero-mean discretized Gaussian with standard deviation `sigma_bins`,
  /// truncated at +-ceil(truncate * sigma_bins) bins.
  static Kernel gaussian(double sigma_bins, double truncate = 4.0);

  std::span<const int> offsets() const noexcept { return offsets_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return offsets_.size(); }

  /// g(-x); used for messages travelling from b back to a.
  Kernel reflected() const;

  /// Mean and variance of the offset distribution, in bins.
  double mean_bins() const noexcept;
  double variance_bins() const noexcept;

  friend bool operator==(const Kernel&, const Kernel&) = default;

 private:
  std::vector<int> offsets_;
  std::vector<double> weights_;
};

/// Kernel of the sum of two independent offsets (a * b).
Kernel compose(const Kernel& a, const Kernel& b);

}  // namespace gaussbp
