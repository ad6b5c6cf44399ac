#include <gtest/gtest.h>

#include <set>

#include "gaussbp/builders.hpp"
#include "gaussbp/error.hpp"
#include "gaussbp/random.hpp"

using namespace gaussbp;

namespace {
const Grid kGrid(64, 0.0, 63.0);
}

TEST(Random, DeriveSeedSeparatesStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 100; ++s) seen.insert(derive_seed(42, s));
  EXPECT_EQ(seen.size(), 100u);
  EXPECT_EQ(derive_seed(42, 3), derive_seed(42, 3));
}

TEST(Random, MersenneSequenceIsStandard) {
  // The 10000th output of a default-seeded mt19937_64 is fixed by the standard.
  std::mt19937_64 e;
  e.discard(9999);
  EXPECT_EQ(e(), 9981545732273789042ULL);
  Rng r(5489);
  const double u = r.uniform();
  EXPECT_GE(u, 0.0);
  EXPECT_LT(u, 1.0);
}

TEST(Random, BelowStaysInRange) {
  Rng r(1);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(r.below(7), 7u);
}

TEST(Builders, RandomPotentialWindow) {
  const auto d = random_potential({16, 42}, kGrid);
  for (std::size_t i = 0; i < kGrid.size(); ++i) {
    if (i >= 24 && i < 40) EXPECT_GT(d[i], 0.0) << i;
    else EXPECT_EQ(d[i], 0.0) << i;
  }
  EXPECT_EQ(d, random_potential({16, 42}, kGrid));
  EXPECT_NE(d, random_potential({16, 43}, kGrid));
}

TEST(Builders, RandomKernelOffsets) {
  const Kernel k = random_kernel(12, 9);
  ASSERT_EQ(k.size(), 12u);
  EXPECT_EQ(k.offsets().front(), -6);
  EXPECT_EQ(k.offsets().back(), 5);
  const Kernel odd = random_kernel(5, 9);
  EXPECT_EQ(odd.offsets().front(), -2);
  EXPECT_EQ(odd.offsets().back(), 2);
}

TEST(Builders, PriorShapes) {
  const auto box = prior_shape_weights(PriorShape::Box, 4);
  EXPECT_EQ(box, std::vector<double>(4, 1.0));
  const auto bump = prior_shape_weights(PriorShape::SkewBump, 8);
  ASSERT_EQ(bump.size(), 8u);
  for (double w : bump) EXPECT_GT(w, 0.0);
  EXPECT_GT(bump[1], bump[6]);
  const auto placed = shaped_window(PriorShape::Box, 4, -2, kGrid);
  EXPECT_DOUBLE_EQ(placed[0], 0.5);
  EXPECT_DOUBLE_EQ(placed[1], 0.5);
  EXPECT_DOUBLE_EQ(placed[2], 0.0);
}

TEST(Builders, KernelSpecMakesPerFactorKernels) {
  const KernelSpec spec = KernelSpec::random(12, 42);
  EXPECT_EQ(spec.make(3), random_kernel(12, derive_seed(42, 3)));
  EXPECT_NE(spec.make(3), spec.make(4));
  EXPECT_EQ(KernelSpec::fixed_kernel(Kernel::delta(2)).make(7), Kernel::delta(2));
  EXPECT_EQ(KernelSpec::gaussian(1.5).make(0), Kernel::gaussian(1.5));
}

TEST(Builders, Chain) {
  const FactorGraph g = build_chain(5, {{0, DiscreteDist::uniform(kGrid)}, {4, DiscreteDist::uniform(kGrid)}},
                                    KernelSpec::random(6, 1), kGrid);
  EXPECT_EQ(g.num_variables(), 5u);
  EXPECT_EQ(g.num_binary(), 4u);
  EXPECT_EQ(g.num_unary(), 2u);
  EXPECT_EQ(g.factor(2).binary().a, 2u);
  EXPECT_EQ(g.factor(2).binary().b, 3u);
  EXPECT_TRUE(g.is_forest());
  EXPECT_THROW(build_chain(1, {}, KernelSpec::random(6, 1), kGrid), std::invalid_argument);
  EXPECT_THROW(build_chain(3, {{3, DiscreteDist::uniform(kGrid)}}, KernelSpec::random(6, 1), kGrid), BadPrior);
}

TEST(Builders, Tree) {
  EXPECT_EQ(tree_leaf_count(3, 2), 8u);
  std::vector<DiscreteDist> leaves(8, DiscreteDist::uniform(kGrid));
  const FactorGraph g = build_tree(3, 2, leaves, KernelSpec::gaussian(1.0), kGrid);
  EXPECT_EQ(g.num_variables(), 15u);
  EXPECT_EQ(g.num_binary(), 14u);
  EXPECT_EQ(g.num_unary(), 8u);
  EXPECT_TRUE(g.is_forest());
  for (VariableId v = 7; v < 15; ++v) EXPECT_TRUE(g.variable(v).prior.has_value());
  EXPECT_FALSE(g.variable(0).prior.has_value());
}

TEST(Builders, Star) {
  std::vector<DiscreteDist> outer(5, DiscreteDist::uniform(kGrid));
  const FactorGraph g = build_star(5, outer, KernelSpec::random(4, 3), kGrid);
  EXPECT_EQ(g.degree(0), 5u);
  for (VariableId v = 1; v <= 5; ++v) EXPECT_EQ(g.degree(v), 2u);
  EXPECT_FALSE(g.variable(0).prior.has_value());
}

TEST(Builders, GridGraphWithMask) {
  const FactorGraph full = build_grid_graph(3, 4, {}, KernelSpec::gaussian(1.0), kGrid);
  EXPECT_EQ(full.num_binary(), 3u * 3u + 2u * 4u);
  const auto& first = full.factor(0).binary();
  EXPECT_EQ(first.a, 0u);
  EXPECT_EQ(first.b, 1u);
  const auto& second = full.factor(1).binary();
  EXPECT_EQ(second.b, 4u);
  const FactorGraph masked = build_grid_graph(3, 4, {}, KernelSpec::gaussian(1.0), kGrid, {unordered(5, 1), unordered(6, 5)});
  EXPECT_EQ(masked.num_binary(), full.num_binary() - 2);
}
