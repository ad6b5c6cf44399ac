#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gaussbp/distribution.hpp"
#include "gaussbp/factor_graph.hpp"
#include "gaussbp/gbp.hpp"
#include "gaussbp/grid.hpp"
#include "gaussbp/image.hpp"
#include "gaussbp/kernel.hpp"

namespace gaussbp {

struct ImagePair {
  GrayImage left;
  GrayImage right;
  std::optional<FloatImage> ground_truth;  ///< disparity in pixels, NaN = invalid

  /// Throws DimensionMismatch when the rasters disagree in shape.
  void validate() const;
  std::size_t width() const noexcept { return left.width; }
  std::size_t height() const noexcept { return left.height; }
};

/// Loads and validates a pair. The ground truth, if given, is read with
/// load_disparity(path, gt_scale, gt_zero_invalid).
ImagePair load_pair(const std::filesystem::path& left, const std::filesystem::path& right,
                    const std::optional<std::filesystem::path>& ground_truth = std::nullopt, double gt_scale = 1.0,
                    bool gt_zero_invalid = false);

/// Middlebury directory: im2.png/im6.png/disp2.png (2003 layout, disparity
/// stored x4, 0 = unknown) or im0.png/im1.png/disp0.pfm (2014 layout).
/// Throws DecodeError when neither layout is present.
ImagePair load_middlebury(const std::filesystem::path& dir);

/// Integer area downsampling by the largest factor that still covers
/// width x height, then a centred crop to exactly that size. Ground truth
/// is rescaled into the new pixel units. Throws DimensionMismatch when the
/// pair is smaller than the target.
ImagePair fit_pair(const ImagePair& pair, std::size_t width, std::size_t height);

/// Random piecewise-constant mosaic of rectangular blocks whose sides are
/// drawn from [min_block, max_block] px, with right(x) = left(x + disparity);
/// ground truth is the constant disparity.
ImagePair synthetic_shift_pair(std::size_t width, std::size_t height, std::size_t disparity, std::uint64_t seed,
                               std::size_t min_block = 3, std::size_t max_block = 8);

enum class MatchingCost { SAD, SSD };

struct StereoConfig {
  int patch_size = 5;
  double lambda = 0.002;
  double edge_threshold = 3.0;  ///< 8-bit intensity difference
  double edge_scale = 1.0;
  Grid disparity_grid{16, 0.0, 15.0};
  Kernel smoothing_kernel = Kernel::gaussian(1.0);
  std::size_t iterations = 10;
  std::uint64_t seed = 42;
  MatchingCost cost = MatchingCost::SAD;
  Projection gbp_projection = Projection::Moment;
  std::size_t threads = 1;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Photometric prior at column u, row v: mass(d) ∝ exp(-lambda (c(d) - min c))
/// with c the patch cost between left(u, v) and right(u - d, v), samples
/// clamped at the borders.
DiscreteDist matching_cost_prior(const ImagePair& pair, std::size_t u, std::size_t v, const StereoConfig& cfg);

/// True when the smoothing factor between two neighbouring pixels is cut.
bool edge_masked(std::uint8_t a, std::uint8_t b, const StereoConfig& cfg);

/// One variable per pixel (id = row * width + col) with its photometric
/// prior; 4-neighbour smoothing factors unless edge_masked().
FactorGraph build_stereo_graph(const ImagePair& pair, const StereoConfig& cfg);

/// Z = f B / d. Throws ZeroDisparity for d <= 0.
double disparity_to_depth(double d, double f, double B);

enum class Engine { BP, GBP };

std::string engine_name(Engine e);

struct StereoReport {
  Engine engine = Engine::BP;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> disparity;       ///< belief mean per pixel
  std::vector<double> kl;              ///< BP only; empty for GBP
  std::vector<double> eps;             ///< BP only; empty for GBP
  std::vector<double> prior_variance;  ///< variance of each pixel's photometric prior
  std::vector<double> mse_trace;       ///< index t = after t iterations
  std::optional<double> mse;           ///< final; empty without ground truth
};

/// Mean squared error over pixels with finite ground truth. Throws
/// DimensionMismatch on a size mismatch and std::invalid_argument when no
/// pixel is valid.
double disparity_mse(const std::vector<double>& estimate, const FloatImage& ground_truth);

/// Builds the graph, runs the chosen engine for cfg.iterations and reports.
/// GBP sees the same graph with priors and kernels moment-projected.
StereoReport run_stereo(const ImagePair& pair, const StereoConfig& cfg, Engine engine);

/// Fraction of pixels with D_KL < threshold within the lowest and highest
/// prior-variance quartiles (ties broken by pixel index).
struct QuartileFractions {
  double bottom = 0.0;
  double top = 0.0;
};
QuartileFractions kl_fraction_by_prior_quartile(const StereoReport& report, double threshold = 0.02);

/// Disparity map scaled to 0..255 over [0, d_max].
GrayImage disparity_image(const StereoReport& report, double d_max);

/// CSV columns u,v,disparity,kl,eps (kl/eps are 0 for GBP).
void write_pixel_csv(std::ostream& out, const StereoReport& report);

}  // namespace gaussbp
