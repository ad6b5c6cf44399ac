#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "gaussbp/cumulants.hpp"
#include "gaussbp/distribution.hpp"

namespace gaussbp {

/// Steady state of a homogeneous chain with priors everywhere.
struct AnchorAnalysis {
  double sigma_e2 = 0.0;          ///< pairwise (kernel) variance
  double sigma_p2 = 0.0;          ///< prior variance
  double sigma_ss2 = 0.0;         ///< steady-state belief variance
  double lambda_retention = 0.0;  ///< sigma_ss2 / (sigma_ss2 + sigma_e2)
  double z = 0.0;                 ///< sigma_e / sigma_ss
  double u = 0.0;                 ///< z^2
  double R = 0.0;                 ///< sigma_p2 / sigma_e2
  /// ((1 - lambda)^1.5 + lambda^3 z^3) / lambda^3; above 1 the prior and
  /// pairwise terms outweigh the memory term for the skewness.
  double dominance_ratio = 0.0;
  bool anchored = false;  ///< R <= R_crit
};

/// Positive root of s^2 + s sigma_e2 - sigma_e2 sigma_p2 = 0, evaluated in
/// a cancellation-free form. Throws std::invalid_argument unless both
/// variances are positive and finite.
AnchorAnalysis solve_steady_state(double sigma_e2, double sigma_p2);

struct CriticalThreshold {
  double u_star = 0.0;
  double R_crit = 0.0;
  double residual = 0.0;  ///< |1 + (1+u)^1.5 - u^-1.5| at u_star
};

/// Bisection of 1 + (1+u)^1.5 = u^-1.5 on (0.01, 10) to width 1e-10;
/// R_crit = (1/u)(1/u + 1).
CriticalThreshold critical_threshold();

/// First-order prediction of the standardized cumulants of the product of
/// two near-Gaussian densities.
struct ContractionPrediction {
  double w_a = 0.0;  ///< sigma_a^2 / (sigma_a^2 + sigma_b^2)
  double w_b = 0.0;
  std::array<double, 4> predicted{};  ///< kappa-hat_3..6 of the product
  std::array<double, 4> observed{};   ///< filled by observe_product_cumulants
  std::array<double, 4> abs_error{};
  double max_abs_error() const;
};

/// Throws DegenerateVariance when either variance is not positive.
ContractionPrediction predict_product_cumulants(const CumulantSummary& a, const CumulantSummary& b);

/// Prediction from the factors' summaries, observation from the actual
/// normalized product a * b.
ContractionPrediction observe_product_cumulants(const DiscreteDist& a, const DiscreteDist& b);

/// Gram-Charlier skewed density phi(z) (1 + eps/6 He3(z)), negative lobes
/// clipped, z = (x - mu) / sd. Its standardized skewness is ~eps for small
/// eps.
DiscreteDist gram_charlier(double eps, double mu, double sd, const Grid& grid);

/// Least-squares slopes of log|kappa-hat_3| and log D_KL against log depth.
struct DecayFit {
  std::optional<double> kappa3_slope;  ///< empty when |kappa-hat_3| < 0.01 everywhere
  std::optional<double> kl_slope;      ///< empty when a D_KL is not positive
  std::size_t first_depth = 0;
  std::size_t last_depth = 0;
};

/// Smallest d_max accepted by decay_rate_fit.
inline constexpr std::size_t kMinDecayDepth = 8;

/// `by_depth[d]` is the belief summary at topological depth d. Depths 0 and
/// 1 are excluded. Throws InsufficientDepth if by_depth.size() <= 8 or a
/// fitted belief is degenerate.
DecayFit decay_rate_fit(std::span<const CumulantSummary> by_depth);

/// Ordinary least-squares slope of y on x. Throws std::invalid_argument for
/// fewer than two points or constant x.
double least_squares_slope(std::span<const double> x, std::span<const double> y);

}  // namespace gaussbp
