#include "gaussbp/stereo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "gaussbp/bp.hpp"
#include "gaussbp/builders.hpp"
#include "gaussbp/csv.hpp"
#include "gaussbp/cumulants.hpp"
#include "gaussbp/error.hpp"
#include "gaussbp/gbp.hpp"
#include "gaussbp/parallel.hpp"
#include "gaussbp/random.hpp"

namespace gaussbp {

namespace {

std::size_t clamp_index(std::ptrdiff_t i, std::size_t n) {
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1));
}

double mean_on_grid(const DiscreteDist& d) {
  double m = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) m += d.grid().center(i) * d[i];
  return m;
}

}  // namespace

void ImagePair::validate() const {
  if (left.width != right.width || left.height != right.height) {
    throw DimensionMismatch("stereo pair: left is " + std::to_string(left.width) + "x" + std::to_string(left.height) +
                            ", right is " + std::to_string(right.width) + "x" + std::to_string(right.height));
  }
  if (ground_truth && (ground_truth->width != left.width || ground_truth->height != left.height)) {
    throw DimensionMismatch("stereo pair: ground truth shape differs from the images");
  }
}

ImagePair load_pair(const std::filesystem::path& left, const std::filesystem::path& right,
                    const std::optional<std::filesystem::path>& ground_truth, double gt_scale, bool gt_zero_invalid) {
  ImagePair pair{load_image(left), load_image(right), std::nullopt};
  if (ground_truth) pair.ground_truth = load_disparity(*ground_truth, gt_scale, gt_zero_invalid);
  pair.validate();
  return pair;
}

ImagePair load_middlebury(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (fs::exists(dir / "im2.png") && fs::exists(dir / "im6.png")) {
    std::optional<fs::path> gt;
    if (fs::exists(dir / "disp2.png")) gt = dir / "disp2.png";
    return load_pair(dir / "im2.png", dir / "im6.png", gt, 0.25, true);
  }
  if (fs::exists(dir / "im0.png") && fs::exists(dir / "im1.png")) {
    std::optional<fs::path> gt;
    if (fs::exists(dir / "disp0.pfm")) gt = dir / "disp0.pfm";
    return load_pair(dir / "im0.png", dir / "im1.png", gt);
  }
  throw DecodeError(dir.string() + ": no Middlebury image pair (im2/im6 or im0/im1)");
}

ImagePair fit_pair(const ImagePair& pair, std::size_t width, std::size_t height) {
  pair.validate();
  if (width == 0 || height == 0 || pair.width() < width || pair.height() < height) {
    throw DimensionMismatch("fit_pair: pair is smaller than " + std::to_string(width) + "x" + std::to_string(height));
  }
  const std::size_t factor = std::min(pair.width() / width, pair.height() / height);
  ImagePair out;
  out.left = downsample_area(pair.left, factor);
  out.right = downsample_area(pair.right, factor);
  if (pair.ground_truth) out.ground_truth = downsample_disparity(*pair.ground_truth, factor);
  const std::size_t row0 = (out.left.height - height) / 2;
  const std::size_t col0 = (out.left.width - width) / 2;
  out.left = crop(out.left, row0, col0, height, width);
  out.right = crop(out.right, row0, col0, height, width);
  if (out.ground_truth) out.ground_truth = crop(*out.ground_truth, row0, col0, height, width);
  return out;
}

ImagePair synthetic_shift_pair(std::size_t width, std::size_t height, std::size_t disparity, std::uint64_t seed,
                                std::size_t min_block, std::size_t max_block) {
  if (width == 0 || height == 0) throw std::invalid_argument("synthetic_shift_pair: empty image");
  if (min_block == 0 || max_block < min_block) throw std::invalid_argument("synthetic_shift_pair: bad block size range");
  Rng rng(seed);
  auto cuts = [&](std::size_t n) {
    std::vector<std::size_t> owner(n);
    std::size_t cell = 0;
    for (std::size_t i = 0; i < n;) {
      const std::size_t len = min_block + rng.below(max_block - min_block + 1);
      for (std::size_t k = 0; k < len && i < n; ++k) owner[i++] = cell;
      ++cell;
    }
    return std::pair{owner, cell};
  };
  const std::size_t base_width = width + disparity;
  const auto [row_cell, n_row_cells] = cuts(height);
  const auto [col_cell, n_col_cells] = cuts(base_width);
  std::vector<std::uint8_t> shade(n_row_cells * n_col_cells);
  for (auto& s : shade) s = static_cast<std::uint8_t>(rng.below(256));

  ImagePair pair{GrayImage(width, height), GrayImage(width, height), FloatImage(width, height, double(disparity))};
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      pair.left.at(r, c) = shade[row_cell[r] * n_col_cells + col_cell[c]];
      pair.right.at(r, c) = shade[row_cell[r] * n_col_cells + col_cell[c + disparity]];
    }
  }
  return pair;
}

void StereoConfig::validate() const {
  if (patch_size < 1 || patch_size % 2 == 0) throw std::invalid_argument("patch_size must be an odd integer >= 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be > 0");
  if (!(edge_threshold >= 0.0)) throw std::invalid_argument("edge_threshold must be >= 0");
  if (!(edge_scale > 0.0)) throw std::invalid_argument("edge_scale must be > 0");
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (disparity_grid.min() < 0.0) throw std::invalid_argument("disparity_grid must start at or above 0");
}

DiscreteDist matching_cost_prior(const ImagePair& pair, std::size_t u, std::size_t v, const StereoConfig& cfg) {
  const Grid& grid = cfg.disparity_grid;
  const auto half = static_cast<std::ptrdiff_t>(cfg.patch_size / 2);
  const std::size_t w = pair.width();
  const std::size_t h = pair.height();
  std::vector<double> cost(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto shift = static_cast<std::ptrdiff_t>(std::lround(grid.center(i)));
    double c = 0.0;
    for (std::ptrdiff_t dy = -half; dy <= half; ++dy) {
      const std::size_t row = clamp_index(static_cast<std::ptrdiff_t>(v) + dy, h);
      for (std::ptrdiff_t dx = -half; dx <= half; ++dx) {
        const auto x = static_cast<std::ptrdiff_t>(u) + dx;
        const double diff = double(pair.left.at(row, clamp_index(x, w))) - double(pair.right.at(row, clamp_index(x - shift, w)));
        c += cfg.cost == MatchingCost::SAD ? std::abs(diff) : diff * diff;
      }
    }
    cost[i] = c;
  }
  const double best = *std::min_element(cost.begin(), cost.end());
  for (double& c : cost) c = std::exp(-cfg.lambda * (c - best));
  return normalize(DiscreteDist(grid, std::move(cost)));
}

bool edge_masked(std::uint8_t a, std::uint8_t b, const StereoConfig& cfg) {
  return std::abs(int(a) - int(b)) > cfg.edge_threshold * cfg.edge_scale;
}

FactorGraph build_stereo_graph(const ImagePair& pair, const StereoConfig& cfg) {
  pair.validate();
  cfg.validate();
  const std::size_t w = pair.width();
  const std::size_t h = pair.height();

  std::vector<DiscreteDist> priors(w * h, DiscreteDist::uniform(cfg.disparity_grid));
  detail::parallel_for(w * h, cfg.threads, [&](std::size_t p) { priors[p] = matching_cost_prior(pair, p % w, p / w, cfg); });
  PriorList prior_list;
  prior_list.reserve(w * h);
  for (std::size_t p = 0; p < w * h; ++p) prior_list.emplace_back(p, std::move(priors[p]));

  EdgeMask mask;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t p = r * w + c;
      if (c + 1 < w && edge_masked(pair.left.at(r, c), pair.left.at(r, c + 1), cfg)) mask.insert(unordered(p, p + 1));
      if (r + 1 < h && edge_masked(pair.left.at(r, c), pair.left.at(r + 1, c), cfg)) mask.insert(unordered(p, p + w));
    }
  }
  return build_grid_graph(h, w, prior_list, KernelSpec::fixed_kernel(cfg.smoothing_kernel), cfg.disparity_grid, mask);
}

double disparity_to_depth(double d, double f, double B) {
  if (!(d > 0.0)) throw ZeroDisparity("disparity_to_depth: disparity must be > 0");
  return f * B / d;
}

std::string engine_name(Engine e) { return e == Engine::BP ? "bp" : "gbp"; }

double disparity_mse(const std::vector<double>& estimate, const FloatImage& ground_truth) {
  if (estimate.size() != ground_truth.size()) throw DimensionMismatch("disparity_mse: size mismatch");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const double g = ground_truth.data[i];
    if (!std::isfinite(g)) continue;
    sum += (estimate[i] - g) * (estimate[i] - g);
    ++n;
  }
  if (n == 0) throw std::invalid_argument("disparity_mse: ground truth has no valid pixel");
  return sum / static_cast<double>(n);
}

StereoReport run_stereo(const ImagePair& pair, const StereoConfig& cfg, Engine engine) {
  const FactorGraph graph = build_stereo_graph(pair, cfg);
  const std::size_t n = graph.num_variables();

  StereoReport report;
  report.engine = engine;
  report.width = pair.width();
  report.height = pair.height();
  report.prior_variance.resize(n);
  for (VariableId v = 0; v < n; ++v) {
    report.prior_variance[v] = summarize(graph.factor(*graph.variable(v).prior).unary().potential).var;
  }

  auto track = [&](const std::vector<double>& means) {
    if (pair.ground_truth) report.mse_trace.push_back(disparity_mse(means, *pair.ground_truth));
  };

  if (engine == Engine::BP) {
    BpOptions options;
    options.iterations = cfg.iterations;
    options.threads = cfg.threads;
    options.record_summaries = false;
    options.on_iteration = [&](std::size_t, const BeliefSet& beliefs) {
      std::vector<double> means(beliefs.size());
      for (std::size_t v = 0; v < beliefs.size(); ++v) means[v] = mean_on_grid(beliefs[v]);
      track(means);
    };
    const BpResult result = run_sync(graph, options);
    report.disparity.resize(n);
    report.kl.resize(n);
    report.eps.resize(n);
    detail::parallel_for(n, cfg.threads, [&](std::size_t v) {
      const CumulantSummary s = summarize(result.beliefs[v]);
      report.disparity[v] = mean_on_grid(result.beliefs[v]);
      report.kl[v] = s.kl_gauss;
      report.eps[v] = s.eps;
    });
  } else {
    GbpOptions options;
    options.iterations = cfg.iterations;
    options.threads = cfg.threads;
    options.record_trace = false;
    options.projection = cfg.gbp_projection;
    options.on_iteration = [&](std::size_t, const std::vector<GaussianMsg>& beliefs) {
      std::vector<double> means(beliefs.size());
      for (std::size_t v = 0; v < beliefs.size(); ++v) means[v] = beliefs[v].mean();
      track(means);
    };
    const GbpResult result = gbp_run_sync(graph, options);
    report.disparity.resize(n);
    for (std::size_t v = 0; v < n; ++v) report.disparity[v] = result.beliefs[v].mean();
  }
  if (!report.mse_trace.empty()) report.mse = report.mse_trace.back();
  return report;
}

QuartileFractions kl_fraction_by_prior_quartile(const StereoReport& report, double threshold) {
  const std::size_t n = report.prior_variance.size();
  if (report.kl.size() != n || n < 4) throw std::invalid_argument("kl_fraction_by_prior_quartile: need BP report with >= 4 pixels");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return report.prior_variance[a] < report.prior_variance[b]; });
  const std::size_t q = n / 4;
  auto fraction = [&](std::size_t begin, std::size_t end) {
    std::size_t hits = 0;
    for (std::size_t i = begin; i < end; ++i) hits += report.kl[order[i]] < threshold ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(end - begin);
  };
  return {fraction(0, q), fraction(n - q, n)};
}

GrayImage disparity_image(const StereoReport& report, double d_max) {
  GrayImage img(report.width, report.height);
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double v = d_max > 0.0 ? 255.0 * report.disparity[i] / d_max : 0.0;
    img.data[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  }
  return img;
}

void write_pixel_csv(std::ostream& out, const StereoReport& report) {
  CsvWriter csv(out);
  csv.header({"u", "v", "disparity", "kl", "eps"});
  for (std::size_t i = 0; i < report.disparity.size(); ++i) {
    csv << i % report.width << i / report.width << report.disparity[i] << (report.kl.empty() ? 0.0 : report.kl[i])
        << (report.eps.empty() ? 0.0 : report.eps[i]);
    csv.end_row();
  }
}

}  // namespace gaussbp
