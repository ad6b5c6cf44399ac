#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "gaussbp/error.hpp"
#include "gaussbp/stereo.hpp"

using namespace gaussbp;
namespace fs = std::filesystem;

namespace {

StereoConfig small_config() {
  StereoConfig cfg;
  cfg.disparity_grid = Grid(6, 0.0, 5.0);
  cfg.iterations = 15;
  return cfg;
}

}  // namespace

TEST(Stereo, SyntheticPairIsShifted) {
  const ImagePair p = synthetic_shift_pair(40, 30, 3, 7);
  ASSERT_NO_THROW(p.validate());
  ASSERT_TRUE(p.ground_truth);
  for (std::size_t r = 0; r < 30; ++r)
    for (std::size_t c = 3; c < 40; ++c) EXPECT_EQ(p.right.at(r, c - 3), p.left.at(r, c));
  for (double d : p.ground_truth->data) EXPECT_EQ(d, 3.0);
  EXPECT_EQ(p.left, synthetic_shift_pair(40, 30, 3, 7).left);
  EXPECT_NE(p.left, synthetic_shift_pair(40, 30, 3, 8).left);
}

TEST(Stereo, ValidateRejectsMismatch) {
  ImagePair p{GrayImage(4, 4), GrayImage(4, 5), std::nullopt};
  EXPECT_THROW(p.validate(), DimensionMismatch);
  p.right = GrayImage(4, 4);
  p.ground_truth = FloatImage(3, 4);
  EXPECT_THROW(p.validate(), DimensionMismatch);
}

TEST(Stereo, PriorPeaksAtTrueDisparity) {
  // Flat blocks tie several disparities at zero cost; the true one must
  // always be among the maxima away from the borders.
  const ImagePair p = synthetic_shift_pair(40, 30, 3, 11);
  StereoConfig cfg = small_config();
  cfg.lambda = 0.05;
  for (std::size_t v = 5; v < 25; ++v)
    for (std::size_t u = 8; u < 32; ++u) {
      const DiscreteDist prior = matching_cost_prior(p, u, v, cfg);
      for (std::size_t d = 0; d < prior.size(); ++d) EXPECT_LE(prior[d], prior[3]) << u << "," << v;
    }
}

TEST(Stereo, PriorIsFlatOnConstantImage) {
  ImagePair p{GrayImage(10, 10, 100), GrayImage(10, 10, 100), std::nullopt};
  const DiscreteDist prior = matching_cost_prior(p, 5, 5, small_config());
  for (std::size_t d = 0; d < prior.size(); ++d) EXPECT_NEAR(prior[d], 1.0 / 6.0, 1e-15);
}

TEST(Stereo, EdgeMask) {
  StereoConfig cfg;
  cfg.edge_threshold = 3.0;
  cfg.edge_scale = 2.0;
  EXPECT_FALSE(edge_masked(10, 16, cfg));
  EXPECT_TRUE(edge_masked(10, 17, cfg));
  EXPECT_TRUE(edge_masked(17, 10, cfg));
}

TEST(Stereo, GraphStructure) {
  ImagePair p{GrayImage(4, 3, 50), GrayImage(4, 3, 50), std::nullopt};
  p.left.at(0, 0) = 200;
  const FactorGraph g = build_stereo_graph(p, small_config());
  EXPECT_EQ(g.num_variables(), 12u);
  EXPECT_EQ(g.num_unary(), 12u);
  EXPECT_EQ(g.num_binary(), 3u * 3u + 2u * 4u - 2u);
}

TEST(Stereo, DepthFromDisparity) {
  EXPECT_DOUBLE_EQ(disparity_to_depth(4.0, 500.0, 0.2), 25.0);
  EXPECT_THROW(disparity_to_depth(0.0, 500.0, 0.2), ZeroDisparity);
  EXPECT_THROW(disparity_to_depth(-1.0, 500.0, 0.2), ZeroDisparity);
}

TEST(Stereo, ConfigValidation) {
  StereoConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.patch_size = 4;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = StereoConfig{};
  cfg.lambda = -1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Stereo, MseIgnoresInvalidPixels) {
  FloatImage gt(2, 1);
  gt.data = {1.0, std::nan("")};
  EXPECT_DOUBLE_EQ(disparity_mse({3.0, 100.0}, gt), 4.0);
  EXPECT_THROW(disparity_mse({1.0}, gt), DimensionMismatch);
  gt.data = {std::nan(""), std::nan("")};
  EXPECT_THROW(disparity_mse({1.0, 1.0}, gt), std::invalid_argument);
}

TEST(Stereo, BothEnginesRecoverShift) {
  const ImagePair p = synthetic_shift_pair(30, 20, 2, 3);
  const StereoConfig cfg = small_config();
  for (Engine e : {Engine::BP, Engine::GBP}) {
    const StereoReport r = run_stereo(p, cfg, e);
    ASSERT_EQ(r.mse_trace.size(), cfg.iterations + 1);
    ASSERT_TRUE(r.mse);
    EXPECT_EQ(*r.mse, r.mse_trace.back());
    EXPECT_LT(r.mse_trace.back(), r.mse_trace.front()) << engine_name(e);
    EXPECT_EQ(r.disparity.size(), 600u);
    EXPECT_EQ(r.prior_variance.size(), 600u);
    EXPECT_EQ(r.kl.size(), e == Engine::BP ? 600u : 0u);
  }
}

TEST(Stereo, ThreadedMatchesSerial) {
  const ImagePair p = synthetic_shift_pair(24, 16, 2, 5);
  StereoConfig cfg = small_config();
  const StereoReport a = run_stereo(p, cfg, Engine::BP);
  cfg.threads = 3;
  const StereoReport b = run_stereo(p, cfg, Engine::BP);
  EXPECT_EQ(a.disparity, b.disparity);
  EXPECT_EQ(a.kl, b.kl);
}

TEST(Stereo, QuartileFractions) {
  StereoReport r;
  r.prior_variance = {4, 3, 2, 1, 8, 7, 6, 5};
  r.kl = {0.0, 0.0, 0.0, 0.5, 0.5, 0.0, 0.5, 0.5};
  const QuartileFractions q = kl_fraction_by_prior_quartile(r, 0.02);
  EXPECT_DOUBLE_EQ(q.bottom, 0.5);  // variances 1, 2
  EXPECT_DOUBLE_EQ(q.top, 0.5);     // variances 7, 8
}

TEST(Stereo, FitPairDownsamplesAndCrops) {
  const ImagePair p = synthetic_shift_pair(130, 100, 4, 1);
  const ImagePair f = fit_pair(p, 60, 50);
  EXPECT_EQ(f.width(), 60u);
  EXPECT_EQ(f.height(), 50u);
  ASSERT_TRUE(f.ground_truth);
  EXPECT_DOUBLE_EQ(f.ground_truth->at(10, 10), 2.0);
  EXPECT_THROW(fit_pair(p, 200, 50), DimensionMismatch);
}

TEST(Stereo, MiddleburyLayouts) {
  const fs::path dir = fs::temp_directory_path() / "gaussbp_mb_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  EXPECT_THROW(load_middlebury(dir), DecodeError);
  const ImagePair p = synthetic_shift_pair(12, 8, 2, 1);
  save_pgm(dir / "im0.pgm", p.left);
  save_pgm(dir / "im1.pgm", p.right);
  save_pfm(dir / "disp0.pfm", *p.ground_truth);
  fs::rename(dir / "im0.pgm", dir / "im0.png");
  fs::rename(dir / "im1.pgm", dir / "im1.png");
  const ImagePair q = load_middlebury(dir);
  EXPECT_EQ(q.left, p.left);
  EXPECT_EQ(q.ground_truth->data, p.ground_truth->data);
  fs::remove_all(dir);
}

TEST(Stereo, PixelCsvAndImage) {
  const ImagePair p = synthetic_shift_pair(8, 4, 1, 2);
  StereoConfig cfg = small_config();
  cfg.iterations = 2;
  const StereoReport r = run_stereo(p, cfg, Engine::GBP);
  std::ostringstream out;
  write_pixel_csv(out, r);
  const std::string s = out.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "u,v,disparity,kl,eps");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 33);
  const GrayImage img = disparity_image(r, 5.0);
  EXPECT_EQ(img.width, 8u);
}
