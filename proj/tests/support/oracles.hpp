#pragma once

// Reference implementations used only by the tests. They share no code with
// the library beyond the graph and distribution containers.

#include <cmath>
#include <cstddef>
#include <vector>

#include "gaussbp/distribution.hpp"
#include "gaussbp/factor_graph.hpp"

namespace gaussbp::oracle {

/// Exact marginals by enumerating every joint state. Feasible for
/// bins^vars up to a few million.
inline std::vector<std::vector<double>> brute_force_marginals(const FactorGraph& g) {
  const std::size_t n = g.num_variables();
  const std::size_t bins = g.grid().size();
  std::size_t states = 1;
  for (std::size_t i = 0; i < n; ++i) states *= bins;

  std::vector<std::vector<long double>> acc(n, std::vector<long double>(bins, 0.0L));
  std::vector<std::size_t> x(n, 0);
  for (std::size_t s = 0; s < states; ++s) {
    std::size_t rest = s;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rest % bins;
      rest /= bins;
    }
    long double p = 1.0L;
    for (const Factor& f : g.factors()) {
      if (f.is_unary()) {
        p *= f.unary().potential[x[f.unary().target]];
        continue;
      }
      const BinaryFactor& bf = f.binary();
      const long long diff = static_cast<long long>(x[bf.b]) - static_cast<long long>(x[bf.a]);
      long double w = 0.0L;
      const auto offs = bf.kernel.offsets();
      for (std::size_t k = 0; k < offs.size(); ++k) {
        if (offs[k] == diff) w = bf.kernel.weights()[k];
      }
      p *= w;
      if (p == 0.0L) break;
    }
    for (std::size_t i = 0; i < n; ++i) acc[i][x[i]] += p;
  }

  std::vector<std::vector<double>> out(n, std::vector<double>(bins));
  for (std::size_t i = 0; i < n; ++i) {
    long double total = 0.0L;
    for (auto v : acc[i]) total += v;
    for (std::size_t b = 0; b < bins; ++b) out[i][b] = static_cast<double>(acc[i][b] / total);
  }
  return out;
}

/// Cumulants 1..6 from raw moments about the origin, in long double.
inline std::vector<double> raw_moment_cumulants(const std::vector<double>& xs, const std::vector<double>& w) {
  long double total = 0.0L;
  long double m[7] = {};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    long double p = w[i];
    total += w[i];
    for (int k = 1; k <= 6; ++k) {
      p *= xs[i];
      m[k] += p;
    }
  }
  for (int k = 1; k <= 6; ++k) m[k] /= total;
  const long double k1 = m[1];
  const long double k2 = m[2] - m[1] * m[1];
  const long double k3 = m[3] - 3 * m[2] * m[1] + 2 * std::pow(m[1], 3);
  const long double k4 = m[4] - 4 * m[3] * m[1] - 3 * m[2] * m[2] + 12 * m[2] * m[1] * m[1] - 6 * std::pow(m[1], 4);
  const long double k5 = m[5] - 5 * m[4] * m[1] - 10 * m[3] * m[2] + 20 * m[3] * m[1] * m[1] +
                         30 * m[2] * m[2] * m[1] - 60 * m[2] * std::pow(m[1], 3) + 24 * std::pow(m[1], 5);
  const long double k6 = m[6] - 6 * m[5] * m[1] - 15 * m[4] * m[2] + 30 * m[4] * m[1] * m[1] - 10 * m[3] * m[3] +
                         120 * m[3] * m[2] * m[1] - 120 * m[3] * std::pow(m[1], 3) + 30 * std::pow(m[2], 3) -
                         270 * m[2] * m[2] * m[1] * m[1] + 360 * m[2] * std::pow(m[1], 4) - 120 * std::pow(m[1], 6);
  return {double(k1), double(k2), double(k3), double(k4), double(k5), double(k6)};
}

/// Direct O(n^2) linear convolution of two mass vectors on a common lattice.
inline std::vector<double> full_convolution(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace gaussbp::oracle
