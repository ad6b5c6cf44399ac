#include "gaussbp/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gaussbp/error.hpp"

namespace gaussbp {

namespace {

double threshold_gap(double u) { return 1.0 + std::pow(1.0 + u, 1.5) - std::pow(u, -1.5); }

}  // namespace

AnchorAnalysis solve_steady_state(double sigma_e2, double sigma_p2) {
  if (!(sigma_e2 > 0.0) || !(sigma_p2 > 0.0) || !std::isfinite(sigma_e2) || !std::isfinite(sigma_p2)) {
    throw std::invalid_argument("solve_steady_state: variances must be positive and finite");
  }
  AnchorAnalysis a;
  a.sigma_e2 = sigma_e2;
  a.sigma_p2 = sigma_p2;
  // s = (-e + sqrt(e^2 + 4 e p)) / 2, rationalized.
  a.sigma_ss2 = 2.0 * sigma_e2 * sigma_p2 / (sigma_e2 + std::sqrt(sigma_e2 * sigma_e2 + 4.0 * sigma_e2 * sigma_p2));
  a.lambda_retention = a.sigma_ss2 / (a.sigma_ss2 + sigma_e2);
  a.u = sigma_e2 / a.sigma_ss2;
  a.z = std::sqrt(a.u);
  a.R = sigma_p2 / sigma_e2;
  const double l = a.lambda_retention;
  a.dominance_ratio = (std::pow(1.0 - l, 1.5) + std::pow(l * a.z, 3.0)) / std::pow(l, 3.0);
  a.anchored = a.R <= critical_threshold().R_crit;
  return a;
}

CriticalThreshold critical_threshold() {
  double lo = 0.01;
  double hi = 10.0;
  // gap < 0 for small u (u^-1.5 dominates), > 0 for large u.
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (threshold_gap(mid) < 0.0 ? lo : hi) = mid;
  }
  CriticalThreshold t;
  t.u_star = 0.5 * (lo + hi);
  t.R_crit = (1.0 / t.u_star) * (1.0 / t.u_star + 1.0);
  t.residual = std::abs(threshold_gap(t.u_star));
  return t;
}

double ContractionPrediction::max_abs_error() const { return *std::max_element(abs_error.begin(), abs_error.end()); }

ContractionPrediction predict_product_cumulants(const CumulantSummary& a, const CumulantSummary& b) {
  if (!(a.var > 0.0) || !(b.var > 0.0)) throw DegenerateVariance("predict_product_cumulants: variances must be positive");
  ContractionPrediction p;
  p.w_a = a.var / (a.var + b.var);
  p.w_b = b.var / (a.var + b.var);
  for (int n = 3; n <= kMaxCumulantOrder; ++n) {
    const double h = 0.5 * n;
    p.predicted[n - 3] = std::pow(p.w_b, h) * a.kappa_hat(n) + std::pow(p.w_a, h) * b.kappa_hat(n);
  }
  return p;
}

ContractionPrediction observe_product_cumulants(const DiscreteDist& a, const DiscreteDist& b) {
  ContractionPrediction p = predict_product_cumulants(cumulants(a), cumulants(b));
  const CumulantSummary c = cumulants(product(a, b));
  for (int n = 3; n <= kMaxCumulantOrder; ++n) {
    p.observed[n - 3] = c.kappa_hat(n);
    p.abs_error[n - 3] = std::abs(p.observed[n - 3] - p.predicted[n - 3]);
  }
  return p;
}

DiscreteDist gram_charlier(double eps, double mu, double sd, const Grid& grid) {
  if (!(sd > 0.0)) throw std::invalid_argument("gram_charlier: sd must be positive");
  std::vector<double> mass(grid.size());
  for (std::size_t i = 0; i < mass.size(); ++i) {
    const double z = (grid.center(i) - mu) / sd;
    const double h3 = z * z * z - 3.0 * z;
    mass[i] = std::max(0.0, std::exp(-0.5 * z * z) * (1.0 + eps / 6.0 * h3));
  }
  return normalize(DiscreteDist(grid, std::move(mass)));
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares_slope: need >= 2 paired points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("least_squares_slope: x is constant");
  return sxy / sxx;
}

DecayFit decay_rate_fit(std::span<const CumulantSummary> by_depth) {
  if (by_depth.size() <= kMinDecayDepth) {
    throw InsufficientDepth("decay_rate_fit: need depths up to at least " + std::to_string(kMinDecayDepth));
  }
  DecayFit fit;
  fit.first_depth = 2;
  fit.last_depth = by_depth.size() - 1;

  std::vector<double> log_d;
  std::vector<double> log_k3;
  std::vector<double> log_kl;
  bool any_skew = false;
  bool kl_ok = true;
  for (std::size_t d = fit.first_depth; d <= fit.last_depth; ++d) {
    const CumulantSummary& s = by_depth[d];
    if (s.degenerate) throw InsufficientDepth("decay_rate_fit: degenerate belief at depth " + std::to_string(d));
    log_d.push_back(std::log(static_cast<double>(d)));
    const double k3 = std::abs(s.skew);
    if (k3 >= 0.01) any_skew = true;
    log_k3.push_back(std::log(std::max(k3, 1e-300)));
    if (s.kl_gauss > 0.0) {
      log_kl.push_back(std::log(s.kl_gauss));
    } else {
      kl_ok = false;
    }
  }
  if (any_skew) fit.kappa3_slope = least_squares_slope(log_d, log_k3);
  if (kl_ok) fit.kl_slope = least_squares_slope(log_d, log_kl);
  return fit;
}

}  // namespace gaussbp
