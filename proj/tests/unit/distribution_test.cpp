#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gaussbp/distribution.hpp"
#include "gaussbp/error.hpp"
#include "oracles.hpp"

using namespace gaussbp;

namespace {
const Grid kGrid(32, 0.0, 31.0);
}

TEST(DiscreteDist, ValidatesMass) {
  EXPECT_THROW(DiscreteDist(kGrid, std::vector<double>(31, 1.0)), GridMismatch);
  std::vector<double> m(32, 1.0);
  m[3] = -1.0;
  EXPECT_THROW(DiscreteDist(kGrid, m), std::invalid_argument);
  m[3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(DiscreteDist(kGrid, m), std::invalid_argument);
}

TEST(DiscreteDist, UniformAndDelta) {
  const auto u = DiscreteDist::uniform(kGrid);
  EXPECT_NEAR(u.total(), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(u[7], 1.0 / 32.0);
  const auto d = DiscreteDist::delta(kGrid, 5);
  EXPECT_DOUBLE_EQ(d[5], 1.0);
  EXPECT_DOUBLE_EQ(d.total(), 1.0);
}

TEST(DiscreteDist, NormalizeThrowsOnZeroMass) {
  EXPECT_THROW(normalize(DiscreteDist(kGrid, std::vector<double>(32, 0.0))), ZeroMass);
}

TEST(DiscreteDist, ProductOfDisjointSupportsThrows) {
  EXPECT_THROW(product(DiscreteDist::delta(kGrid, 1), DiscreteDist::delta(kGrid, 2)), ZeroMass);
  EXPECT_THROW(product(DiscreteDist::uniform(kGrid), DiscreteDist::uniform(Grid(32, 0.0, 1.0))), GridMismatch);
}

TEST(DiscreteDist, ProductIsPointwise) {
  std::vector<double> a(32), b(32);
  for (std::size_t i = 0; i < 32; ++i) {
    a[i] = 1.0 + double(i);
    b[i] = 32.0 - double(i);
  }
  const auto p = product(DiscreteDist(kGrid, a), DiscreteDist(kGrid, b));
  double total = 0.0;
  for (std::size_t i = 0; i < 32; ++i) total += a[i] * b[i];
  for (std::size_t i = 0; i < 32; ++i) EXPECT_NEAR(p[i], a[i] * b[i] / total, 1e-15);
}

TEST(DiscreteDist, ConvolveMatchesOracleAwayFromEdges) {
  std::vector<double> m(32, 0.0);
  m[10] = 1.0;
  m[11] = 2.0;
  m[13] = 0.5;
  const Kernel k({-1, 0, 2}, {0.2, 0.5, 0.3});
  const auto out = convolve(DiscreteDist(kGrid, m), k);
  const auto full = oracle::full_convolution(m, {0.2, 0.5, 0.0, 0.3});
  double total = 0.0;
  for (double x : full) total += x;
  // full[j] sits at grid bin j - 1 (the kernel starts at offset -1).
  for (std::size_t j = 0; j < 32; ++j) EXPECT_NEAR(out[j], full[j + 1] / total, 1e-15) << j;
}

TEST(DiscreteDist, ConvolveTruncatesWithoutWrapping) {
  const auto out = convolve(DiscreteDist::delta(kGrid, 31), Kernel({0, 1}, {0.5, 0.5}));
  EXPECT_DOUBLE_EQ(out[31], 1.0);
  EXPECT_DOUBLE_EQ(out[0], 0.0);
  EXPECT_THROW(convolve(DiscreteDist::delta(kGrid, 31), Kernel::delta(1)), ZeroMass);
}

TEST(DiscreteDist, GaussianOnGrid) {
  const Grid g(401, -20.0, 20.0);
  const auto d = gaussian_on_grid(1.5, 4.0, g);
  double m = 0.0, v = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) m += d[i] * g.center(i);
  for (std::size_t i = 0; i < g.size(); ++i) v += d[i] * (g.center(i) - m) * (g.center(i) - m);
  EXPECT_NEAR(m, 1.5, 1e-9);
  EXPECT_NEAR(v, 4.0, 1e-6);
  EXPECT_THROW(gaussian_on_grid(0.0, 0.0, g), std::invalid_argument);
  EXPECT_THROW(gaussian_on_grid(1e6, 1.0, g), ZeroMass);
}

TEST(DiscreteDist, KernelOnGridDropsOverhang) {
  const auto d = kernel_on_grid(Kernel({-2, 0, 1}, {1.0, 1.0, 2.0}), kGrid, 0);
  EXPECT_NEAR(d[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(d[1], 2.0 / 3.0, 1e-15);
}

TEST(DiscreteDist, LinfDistance) {
  EXPECT_DOUBLE_EQ(linf_distance(DiscreteDist::delta(kGrid, 0), DiscreteDist::delta(kGrid, 1)), 1.0);
  EXPECT_DOUBLE_EQ(linf_distance(DiscreteDist::uniform(kGrid), DiscreteDist::uniform(kGrid)), 0.0);
}
