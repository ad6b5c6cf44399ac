#include <gtest/gtest.h>

#include <sstream>

#include "gaussbp/bp.hpp"
#include "gaussbp/builders.hpp"
#include "gaussbp/error.hpp"
#include "gaussbp/random.hpp"
#include "oracles.hpp"

using namespace gaussbp;

namespace {

FactorGraph random_forest(std::uint64_t seed, std::size_t max_vars, std::size_t max_bins) {
  Rng rng(seed);
  const std::size_t n = 2 + rng.below(max_vars - 1);
  const std::size_t bins = 3 + rng.below(max_bins - 2);
  const Grid grid(bins, 0.0, double(bins - 1));
  FactorGraph g(grid);
  g.add_variables(n);
  for (std::size_t v = 1; v < n; ++v) {
    const VariableId parent = rng.below(v);
    const Kernel k = random_kernel(1 + rng.below(bins), rng.next());
    if (rng.below(2)) g.add_binary(parent, v, k);
    else g.add_binary(v, parent, k);
  }
  for (std::size_t v = 0; v < n; ++v)
    if (rng.below(2)) g.add_unary(v, random_potential({bins, rng.next()}, grid));
  return g;
}

double max_error(const FactorGraph& g, const BeliefSet& b) {
  const auto truth = oracle::brute_force_marginals(g);
  double worst = 0.0;
  for (std::size_t v = 0; v < g.num_variables(); ++v)
    for (std::size_t i = 0; i < g.grid().size(); ++i) worst = std::max(worst, std::abs(b[v][i] - truth[v][i]));
  return worst;
}

FactorGraph cycle3(const Grid& grid) {
  FactorGraph g(grid);
  g.add_variables(3);
  g.add_binary(0, 1, random_kernel(4, 1));
  g.add_binary(1, 2, random_kernel(4, 2));
  g.add_binary(2, 0, random_kernel(4, 3));
  for (VariableId v = 0; v < 3; ++v) g.add_unary(v, random_potential({grid.size(), 10 + v}, grid));
  return g;
}

}  // namespace

TEST(Bp, TreeExactMatchesBruteForce) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const FactorGraph g = random_forest(derive_seed(7, s), 5, 12);
    EXPECT_LT(max_error(g, run_tree_exact(g)), 1e-12) << "seed " << s;
  }
}

TEST(Bp, SyncOnTreeReachesExactMarginals) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const FactorGraph g = random_forest(derive_seed(8, s), 5, 10);
    const BpResult r = run_sync(g, g.num_variables());
    EXPECT_LT(max_error(g, r.beliefs), 1e-12) << "seed " << s;
  }
}

TEST(Bp, TwoVariableClosedForm) {
  const Grid grid(5, 0.0, 4.0);
  FactorGraph g(grid);
  g.add_variables(2);
  g.add_unary(0, DiscreteDist::delta(grid, 1));
  g.add_binary(0, 1, Kernel({0, 2}, {0.25, 0.75}));
  const BeliefSet b = run_tree_exact(g);
  EXPECT_DOUBLE_EQ(b[1][1], 0.25);
  EXPECT_DOUBLE_EQ(b[1][3], 0.75);
  // The reflected kernel carries evidence back from b to a.
  FactorGraph h(grid);
  h.add_variables(2);
  h.add_unary(1, DiscreteDist::delta(grid, 3));
  h.add_binary(0, 1, Kernel({0, 2}, {0.25, 0.75}));
  const BeliefSet c = run_tree_exact(h);
  EXPECT_DOUBLE_EQ(c[0][3], 0.25);
  EXPECT_DOUBLE_EQ(c[0][1], 0.75);
}

TEST(Bp, TreeExactRejectsCycles) {
  EXPECT_THROW(run_tree_exact(cycle3(Grid(8, 0.0, 7.0))), NotATree);
}

TEST(Bp, ThreadedRunIsBitIdentical) {
  const FactorGraph g = cycle3(Grid(32, 0.0, 31.0));
  BpOptions serial;
  serial.iterations = 12;
  BpOptions threaded = serial;
  threaded.threads = 4;
  const BpResult a = run_sync(g, serial);
  const BpResult b = run_sync(g, threaded);
  EXPECT_EQ(a.beliefs, b.beliefs);
  EXPECT_TRUE(a.messages == b.messages);
}

TEST(Bp, TraceAndCallbacks) {
  const FactorGraph g = cycle3(Grid(32, 0.0, 31.0));
  BpOptions opt;
  opt.iterations = 5;
  std::vector<std::size_t> seen;
  opt.on_iteration = [&](std::size_t t, const BeliefSet& b) {
    seen.push_back(t);
    EXPECT_EQ(b.size(), 3u);
  };
  const BpResult r = run_sync(g, opt);
  EXPECT_EQ(seen, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5}));
  ASSERT_EQ(r.trace.iterations.size(), 6u);
  EXPECT_EQ(r.trace.iterations[0].iteration, 0u);
  EXPECT_EQ(r.trace.iterations[3].summaries.size(), 3u);

  std::ostringstream csv;
  write_trace_csv(csv, r.trace);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "iteration,variable,mu,var,skew,exkurt,eps,kl_gauss");
}

TEST(Bp, ConvergenceCheck) {
  BpTrace t;
  for (double c : {1.0, 0.5, 1e-3, 1e-9}) t.iterations.push_back({t.iterations.size(), c, {}});
  EXPECT_EQ(convergence_check(t, 1e-2), 2u);
  EXPECT_EQ(convergence_check(t, 1e-12), std::nullopt);
  EXPECT_EQ(convergence_check(t, 0.0), std::nullopt);
  EXPECT_EQ(convergence_check(t, 2.0), 1u);
}

TEST(Bp, DampingKeepsTreeFixedPoint) {
  const FactorGraph g = random_forest(99, 5, 10);
  BpOptions opt;
  opt.iterations = 200;
  opt.damping = 0.5;
  opt.record_summaries = false;
  EXPECT_LT(max_error(g, run_sync(g, opt).beliefs), 1e-10);
}

TEST(Bp, VanishedMessageNamesEdge) {
  const Grid grid(4, 0.0, 3.0);
  FactorGraph g(grid);
  g.add_variables(2);
  g.add_unary(0, DiscreteDist::delta(grid, 3));
  g.add_binary(0, 1, Kernel::delta(1));
  try {
    run_sync(g, 2);
    FAIL() << "expected ZeroMass";
  } catch (const ZeroMass& e) {
    ASSERT_TRUE(e.edge().has_value());
    EXPECT_EQ(e.edge()->variable, 1u);
    EXPECT_TRUE(e.edge()->to_variable);
  }
}

TEST(Bp, MessageRules) {
  const Grid grid(8, 0.0, 7.0);
  FactorGraph g(grid);
  g.add_variables(2);
  const FactorId u = g.add_unary(0, DiscreteDist::delta(grid, 2));
  const FactorId f = g.add_binary(0, 1, Kernel::delta(3));
  MessageStore store(g);
  EXPECT_EQ(factor_to_var(g, u, 0, store), DiscreteDist::delta(grid, 2));
  EXPECT_EQ(var_to_factor(g, 1, f, store), DiscreteDist::uniform(grid));
  store.set_to_factor(g.edge_between(f, 0), DiscreteDist::delta(grid, 2));
  EXPECT_EQ(factor_to_var(g, f, 1, store), DiscreteDist::delta(grid, 5));
  EXPECT_THROW(var_to_factor(g, 1, u, store), InvalidGraph);
}
