#include "gaussbp/cumulants.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gaussbp/error.hpp"

namespace gaussbp {

RawCumulants weighted_cumulants(std::span<const double> xs, std::span<const double> weights) {
  if (xs.size() != weights.size() || xs.empty()) {
    throw std::invalid_argument("weighted_cumulants: need equal, non-empty spans");
  }
  double total = 0.0;
  double mean = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    total += weights[i];
    mean += weights[i] * xs[i];
  }
  if (!(total > 0.0)) throw ZeroMass("weighted_cumulants: weights sum to zero");
  mean /= total;

  // Central moments m2..m6.
  std::array<double, 7> m{};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (weights[i] == 0.0) continue;
    const double d = xs[i] - mean;
    double p = d * d;
    for (int k = 2; k <= 6; ++k) {
      m[k] += weights[i] * p;
      p *= d;
    }
  }
  for (int k = 2; k <= 6; ++k) m[k] /= total;

  RawCumulants c;
  c.kappa[0] = mean;
  c.kappa[1] = m[2];
  c.kappa[2] = m[3];
  c.kappa[3] = m[4] - 3.0 * m[2] * m[2];
  c.kappa[4] = m[5] - 10.0 * m[3] * m[2];
  c.kappa[5] = m[6] - 15.0 * m[4] * m[2] - 10.0 * m[3] * m[3] + 30.0 * m[2] * m[2] * m[2];
  return c;
}

RawCumulants kernel_cumulants(const Kernel& k, double step) {
  std::vector<double> xs(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) xs[i] = k.offsets()[i] * step;
  return weighted_cumulants(xs, k.weights());
}

namespace {

std::vector<double> centers(const Grid& grid) {
  std::vector<double> xs(grid.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = grid.center(i);
  return xs;
}

double kl_against_fit(const DiscreteDist& d, double mu, double var) {
  return kl_divergence(d, gaussian_on_grid(mu, var, d.grid()));
}

}  // namespace

double kl_divergence(const DiscreteDist& p, const DiscreteDist& q) {
  if (!(p.grid() == q.grid())) throw GridMismatch("kl_divergence: different grids");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    const double a = std::max(p[i], kKlFloor);
    const double b = std::max(q[i], kKlFloor);
    acc += p[i] * std::log(a / b);
  }
  return std::max(acc, 0.0);
}

CumulantSummary summarize(const DiscreteDist& d) {
  const auto xs = centers(d.grid());
  const RawCumulants raw = weighted_cumulants(xs, d.mass());

  CumulantSummary s;
  s.mu = raw.mean();
  s.var = std::max(raw.variance(), 0.0);
  if (s.var < kDegenerateVariance) {
    s.degenerate = true;
    return s;
  }
  const double sd = std::sqrt(s.var);
  double scale = sd * sd * sd;
  for (int n = 3; n <= kMaxCumulantOrder; ++n) {
    s.standardized[static_cast<std::size_t>(n - 3)] = raw(n) / scale;
    scale *= sd;
  }
  s.skew = s.standardized[0];
  s.exkurt = s.standardized[1];
  s.eps = 0.0;
  for (double k : s.standardized) s.eps = std::max(s.eps, std::abs(k));
  s.kl_gauss = kl_against_fit(d, s.mu, s.var);
  return s;
}

CumulantSummary cumulants(const DiscreteDist& d) {
  CumulantSummary s = summarize(d);
  if (s.degenerate) throw DegenerateVariance("cumulants: variance below 1e-12 (point mass)");
  return s;
}

double kl_to_gaussian_fit(const DiscreteDist& d) {
  const auto xs = centers(d.grid());
  const RawCumulants raw = weighted_cumulants(xs, d.mass());
  if (raw.variance() < kDegenerateVariance) {
    throw DegenerateVariance("kl_to_gaussian_fit: variance below 1e-12 (point mass)");
  }
  return kl_against_fit(d, raw.mean(), raw.variance());
}

}  // namespace gaussbp
