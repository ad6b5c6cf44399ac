#include "gaussbp/kernel.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace gaussbp {

Kernel::Kernel(std::vector<int> offsets, std::vector<double> weights)
    : offsets_(std::move(offsets)), weights_(std::move(weights)) {
  if (offsets_.empty() || offsets_.size() != weights_.size()) {
    throw std::invalid_argument("Kernel: offsets and weights must be non-empty and equal length");
  }
  for (std::size_t i = 1; i < offsets_.size(); ++i) {
    if (offsets_[i] <= offsets_[i - 1]) {
      throw std::invalid_argument("Kernel: offsets must be strictly increasing");
    }
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) throw std::invalid_argument("Kernel: weights must be finite and >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("Kernel: weights sum to zero");
  // Already-normalized input is kept bit for bit so reflection and
  // serialization round-trips are exact.
  const double slack = 4.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(weights_.size());
  if (std::abs(total - 1.0) <= slack) return;
  for (double& w : weights_) w /= total;
}

Kernel Kernel::delta(int offset) { return Kernel({offset}, {1.0}); }

Kernel Kernel::gaussian(double sigma_bins, double truncate) {
  if (!(sigma_bins > 0.0) || !(truncate > 0.0)) {
    throw std::invalid_argument("Kernel::gaussian: sigma and truncation must be positive");
  }
  const int half = static_cast<int>(std::ceil(truncate * sigma_bins));
  std::vector<int> offsets;
  std::vector<double> weights;
  for (int d = -half; d <= half; ++d) {
    offsets.push_back(d);
    weights.push_back(std::exp(-0.5 * d * d / (sigma_bins * sigma_bins)));
  }
  return Kernel(std::move(offsets), std::move(weights));
}

Kernel Kernel::reflected() const {
  std::vector<int> offsets(offsets_.rbegin(), offsets_.rend());
  std::vector<double> weights(weights_.rbegin(), weights_.rend());
  for (int& o : offsets) o = -o;
  return Kernel(std::move(offsets), std::move(weights));
}

double Kernel::mean_bins() const noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i < offsets_.size(); ++i) m += weights_[i] * offsets_[i];
  return m;
}

double Kernel::variance_bins() const noexcept {
  const double m = mean_bins();
  double v = 0.0;
  for (std::size_t i = 0; i < offsets_.size(); ++i) {
    const double d = offsets_[i] - m;
    v += weights_[i] * d * d;
  }
  return v;
}

Kernel compose(const Kernel& a, const Kernel& b) {
  std::map<int, double> acc;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      acc[a.offsets()[i] + b.offsets()[j]] += a.weights()[i] * b.weights()[j];
    }
  }
  std::vector<int> offsets;
  std::vector<double> weights;
  offsets.reserve(acc.size());
  weights.reserve(acc.size());
  for (const auto& [o, w] : acc) {
    offsets.push_back(o);
    weights.push_back(w);
  }
  return Kernel(std::move(offsets), std::move(weights));
}

}  // namespace gaussbp
