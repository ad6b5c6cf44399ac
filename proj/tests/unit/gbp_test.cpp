#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "gaussbp/builders.hpp"
#include "gaussbp/cumulants.hpp"
#include "gaussbp/error.hpp"
#include "gaussbp/gbp.hpp"

using namespace gaussbp;

namespace {

const Grid kGrid(512, -32.0, 32.0);

struct Dense {
  std::vector<std::vector<double>> J;
  std::vector<double> h;
};

// Joint information form of the projected model, built term by term.
Dense joint_information(const FactorGraph& g) {
  const std::size_t n = g.num_variables();
  Dense d{std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)), std::vector<double>(n, 0.0)};
  const GaussianGraph gg(g);
  for (const Factor& f : g.factors()) {
    if (f.is_unary()) {
      const GaussianMsg& p = gg.prior(f.id);
      d.J[f.unary().target][f.unary().target] += p.precision();
      d.h[f.unary().target] += p.information();
      continue;
    }
    const auto [mu, var] = gg.kernel(f.id);
    const VariableId a = f.binary().a, b = f.binary().b;
    // (x_b - x_a - mu)^2 / (2 var)
    d.J[a][a] += 1 / var;
    d.J[b][b] += 1 / var;
    d.J[a][b] -= 1 / var;
    d.J[b][a] -= 1 / var;
    d.h[b] += mu / var;
    d.h[a] -= mu / var;
  }
  return d;
}

// Gauss-Jordan inverse.
std::vector<std::vector<double>> inverse(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    std::swap(a[c], a[p]);
    std::swap(inv[c], inv[p]);
    const double s = a[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c][k] /= s;
      inv[c][k] /= s;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double m = a[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= m * a[c][k];
        inv[r][k] -= m * inv[c][k];
      }
    }
  }
  return inv;
}

}  // namespace

TEST(GaussianMsg, InformationForm) {
  const GaussianMsg a = GaussianMsg::from_moments(2.0, 4.0);
  EXPECT_DOUBLE_EQ(a.precision(), 0.25);
  EXPECT_DOUBLE_EQ(a.information(), 0.5);
  EXPECT_DOUBLE_EQ(a.mean(), 2.0);
  EXPECT_DOUBLE_EQ(a.var(), 4.0);
  const GaussianMsg p = a * GaussianMsg::from_moments(-1.0, 1.0);
  EXPECT_DOUBLE_EQ(p.precision(), 1.25);
  EXPECT_DOUBLE_EQ(p.mean(), (0.5 - 1.0) / 1.25);
  EXPECT_EQ(a * GaussianMsg::vague(), a);
}

TEST(GaussianMsg, VagueAndInvalid) {
  const GaussianMsg v = GaussianMsg::vague();
  EXPECT_TRUE(v.is_vague());
  EXPECT_TRUE(std::isinf(v.var()));
  EXPECT_THROW((void)v.mean(), AllVague);
  EXPECT_THROW(GaussianMsg::from_moments(0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(GaussianMsg::from_moments(0.0, -1.0), std::invalid_argument);
  EXPECT_THROW(GaussianMsg::from_information(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(GaussianMsg::from_information(0.0, -1.0), std::invalid_argument);
}

TEST(Projection, MomentMatching) {
  const auto d = random_potential({40, 3}, kGrid);
  const GaussianMsg m = gaussian_project(d);
  const CumulantSummary c = cumulants(d);
  EXPECT_DOUBLE_EQ(m.mean(), c.mu);
  EXPECT_NEAR(m.var(), c.var, 1e-12 * c.var);
  EXPECT_THROW(gaussian_project(DiscreteDist::delta(kGrid, 4)), DegenerateVariance);
}

TEST(Projection, LaplaceIsExactForDiscretizedGaussian) {
  const auto d = gaussian_on_grid(1.3, 2.5, kGrid);
  const GaussianMsg m = laplace_project(d);
  EXPECT_NEAR(m.mean(), 1.3, 1e-9);
  EXPECT_NEAR(m.var(), 2.5, 1e-9);
}

TEST(Projection, LaplaceFollowsTheMode) {
  // Tall narrow bump plus a broad shelf: the moment mean sits between them.
  std::vector<double> mass(kGrid.size(), 0.0);
  for (std::size_t i = 100; i < 400; ++i) mass[i] = 0.002;
  for (std::size_t i = 120; i < 130; ++i) mass[i] += 0.05 * std::exp(-0.5 * std::pow(double(i) - 125.0, 2));
  const DiscreteDist d(kGrid, mass);
  EXPECT_NEAR(laplace_project(d).mean(), kGrid.center(125), 2 * kGrid.step());
  EXPECT_GT(std::abs(gaussian_project(d).mean() - kGrid.center(125)), 10 * kGrid.step());
}

TEST(Gbp, ChainMatchesDenseSolve) {
  const PriorList priors{{0, random_potential({30, 1}, kGrid)}, {4, random_potential({20, 2}, kGrid)}};
  const FactorGraph g = build_chain(5, priors, KernelSpec::random(12, 5), kGrid);
  const GbpResult r = gbp_run_sync(g, 5);
  const Dense d = joint_information(g);
  const auto cov = inverse(d.J);
  for (VariableId v = 0; v < 5; ++v) {
    double mean = 0.0;
    for (std::size_t k = 0; k < 5; ++k) mean += cov[v][k] * d.h[k];
    EXPECT_NEAR(r.beliefs[v].mean(), mean, 1e-9) << v;
    EXPECT_NEAR(r.beliefs[v].var(), cov[v][v], 1e-9) << v;
  }
}

TEST(Gbp, LoopyMeansAreExactAtConvergence) {
  PriorList priors;
  for (VariableId v = 0; v < 9; ++v) priors.emplace_back(v, random_potential({24, 40 + v}, kGrid));
  const FactorGraph g = build_grid_graph(3, 3, priors, KernelSpec::random(8, 9), kGrid);
  GbpOptions opt;
  opt.iterations = 200;
  opt.record_trace = false;
  const GbpResult r = gbp_run_sync(g, opt);
  const Dense d = joint_information(g);
  const auto cov = inverse(d.J);
  for (VariableId v = 0; v < 9; ++v) {
    double mean = 0.0;
    for (std::size_t k = 0; k < 9; ++k) mean += cov[v][k] * d.h[k];
    EXPECT_NEAR(r.beliefs[v].mean(), mean, 1e-8) << v;
  }
}

TEST(Gbp, UnreachedVariableIsAllVague) {
  FactorGraph g(kGrid);
  g.add_variables(3);
  g.add_unary(0, random_potential({10, 1}, kGrid));
  g.add_binary(1, 2, Kernel::gaussian(1.0));
  EXPECT_THROW(gbp_run_sync(g, 3), AllVague);
}

TEST(Gbp, MessagesShiftByKernelMean) {
  FactorGraph g(kGrid);
  g.add_variables(2);
  g.add_unary(0, gaussian_on_grid(0.0, 1.0, kGrid));
  g.add_binary(0, 1, Kernel({0, 16}, {0.5, 0.5}));
  const GbpResult r = gbp_run_sync(g, 2);
  EXPECT_NEAR(r.beliefs[1].mean() - r.beliefs[0].mean(), 8 * kGrid.step(), 1e-9);
  EXPECT_NEAR(r.beliefs[1].var() - r.beliefs[0].var(), 64 * kGrid.step() * kGrid.step(), 1e-9);
}

TEST(Gbp, TraceAndThreads) {
  PriorList priors;
  for (VariableId v = 0; v < 4; ++v) priors.emplace_back(v, random_potential({16, v}, kGrid));
  const FactorGraph g = build_grid_graph(2, 2, priors, KernelSpec::gaussian(2.0), kGrid);
  GbpOptions opt;
  opt.iterations = 7;
  const GbpResult a = gbp_run_sync(g, opt);
  opt.threads = 3;
  const GbpResult b = gbp_run_sync(g, opt);
  EXPECT_EQ(a.beliefs, b.beliefs);
  ASSERT_EQ(a.trace.size(), 8u);
  EXPECT_EQ(a.trace[7].beliefs, a.beliefs);
  std::ostringstream csv;
  write_gbp_trace_csv(csv, a);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "iteration,variable,mu,var,skew,exkurt,eps");
}
