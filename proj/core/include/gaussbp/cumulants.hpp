#pragma once

#include <array>
#include <span>

#include "gaussbp/distribution.hpp"
#include "gaussbp/kernel.hpp"

namespace gaussbp {

/// Highest cumulant order tracked. Orders above six are dominated by
/// discretization noise on ~1e3-bin grids.
inline constexpr int kMaxCumulantOrder = 6;

/// Variance below which a distribution counts as a point mass.
inline constexpr double kDegenerateVariance = 1e-12;

/// Raw cumulants kappa_1..kappa_6 of a weighted point set.
struct RawCumulants {
  std::array<double, kMaxCumulantOrder> kappa{};

  double operator()(int order) const { return kappa.at(static_cast<std::size_t>(order - 1)); }
  double mean() const { return kappa[0]; }
  double variance() const { return kappa[1]; }
};

/// Cumulants of the points `xs` with (not necessarily normalized) weights.
/// Moments are accumulated about the mean, which is algebraically identical
/// to the raw-moment polynomials but stable for narrow distributions far
/// from the origin.
RawCumulants weighted_cumulants(std::span<const double> xs, std::span<const double> weights);

/// Cumulants of a kernel's offsets scaled to state units by `step`.
RawCumulants kernel_cumulants(const Kernel& k, double step);

/// Gaussianity summary of one belief.
struct CumulantSummary {
  double mu = 0.0;
  double var = 0.0;
  double skew = 0.0;      ///< standardized kappa_3
  double exkurt = 0.0;    ///< standardized kappa_4
  double eps = 0.0;       ///< max |standardized kappa_n|, n = 3..6
  double kl_gauss = 0.0;  ///< D_KL(d || moment-matched discretized Gaussian), nats
  std::array<double, 4> standardized{};  ///< kappa-hat_3 .. kappa-hat_6
  bool degenerate = false;

  double kappa_hat(int order) const {
    return standardized.at(static_cast<std::size_t>(order - 3));
  }
};

/// Full summary. Throws DegenerateVariance when var < kDegenerateVariance.
CumulantSummary cumulants(const DiscreteDist& d);

/// Like cumulants(), but a point mass is reported with degenerate = true,
/// its mean and variance, and zero shape statistics. A single-bin belief is
/// its own limiting discretized Gaussian, so kl_gauss is 0 there.
CumulantSummary summarize(const DiscreteDist& d);

/// sum_i d_i ln(d_i / fit_i) against the moment-matched discretized Gaussian
/// on d's grid, both sides floored at kKlFloor. Throws DegenerateVariance.
double kl_to_gaussian_fit(const DiscreteDist& d);

inline constexpr double kKlFloor = 1e-12;

/// Floored KL divergence between two distributions on the same grid.
double kl_divergence(const DiscreteDist& p, const DiscreteDist& q);

}  // namespace gaussbp
