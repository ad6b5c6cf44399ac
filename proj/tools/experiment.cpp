#include "experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gaussbp/bp.hpp"
#include "gaussbp/computation_tree.hpp"
#include "gaussbp/csv.hpp"
#include "gaussbp/cumulants.hpp"
#include "gaussbp/error.hpp"
#include "gaussbp/parallel.hpp"
#include "gaussbp/random.hpp"
#include "gaussbp/theory.hpp"

#ifndef GAUSSBP_VERSION
#define GAUSSBP_VERSION "0.0.0"
#endif

namespace gaussbp::exp {

using json = nlohmann::ordered_json;

namespace {

// Independent random streams per seed.
constexpr std::uint64_t kKernelStream = 1;
constexpr std::uint64_t kPriorStream = 2;
constexpr std::uint64_t kPlacementStream = 3;
constexpr std::uint64_t kImageStream = 4;

const std::vector<KindInfo> kKinds = {
    {Kind::Chain, "chain", "belief D_KL vs distance to the nearest prior on a chain"},
    {Kind::Tree, "tree", "belief D_KL vs distance to the nearest prior on a complete tree"},
    {Kind::Star, "star", "belief D_KL vs distance on a star with priors on the outer variables"},
    {Kind::Grid, "grid", "belief D_KL vs distance to the nearest prior on a 4-connected grid"},
    {Kind::PriorSweep, "prior-sweep", "final D_KL on a priors-everywhere chain vs prior width"},
    {Kind::DegreeSweep, "degree-sweep", "central-belief non-Gaussianity of a star vs its degree"},
    {Kind::ConvergenceRate, "convergence-rate", "skewness and D_KL vs depth from a point prior, with log-log fits"},
    {Kind::TreeEquivalence, "tree-equivalence", "root belief on a loopy graph vs its unwrapped computation tree"},
    {Kind::Stereo, "stereo", "BP and GBP disparity MSE traces plus per-pixel D_KL on a stereo pair"},
};

// ---------------------------------------------------------------------------
// Config reading with line-referenced diagnostics.

std::size_t line_at(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

struct Diagnostics {
  const std::string& text;
  std::vector<std::pair<std::size_t, std::string>> items;

  void add(std::size_t line, std::string msg) { items.emplace_back(line, std::move(msg)); }
};

class Reader {
 public:
  Reader(const json& obj, Diagnostics& diag, std::size_t anchor, std::string path)
      : obj_(obj), diag_(diag), anchor_(anchor), path_(std::move(path)) {}

  bool has(const std::string& key) const { return obj_.contains(key); }

  std::size_t line_of(const std::string& key) const {
    const std::size_t pos = diag_.text.find("\"" + key + "\"", anchor_);
    return line_at(diag_.text, pos == std::string::npos ? anchor_ : pos);
  }

  void error(const std::string& key, const std::string& msg) { diag_.add(line_of(key), qualified(key) + ": " + msg); }

  std::size_t uint(const std::string& key, std::size_t def, std::size_t min, std::size_t max) {
    seen_.insert(key);
    if (!has(key)) return def;
    const json& v = obj_.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0)) {
      error(key, "expected a non-negative integer");
      return def;
    }
    const auto x = v.get<std::size_t>();
    if (x < min || x > max) {
      error(key, "must be in [" + std::to_string(min) + ", " + std::to_string(max) + "], got " + std::to_string(x));
      return def;
    }
    return x;
  }

  std::uint64_t u64(const std::string& key, std::uint64_t def) {
    seen_.insert(key);
    if (!has(key)) return def;
    const json& v = obj_.at(key);
    if (!v.is_number_unsigned()) {
      error(key, "expected a non-negative integer");
      return def;
    }
    return v.get<std::uint64_t>();
  }

  double real(const std::string& key, double def, bool (*ok)(double), const char* requirement) {
    seen_.insert(key);
    if (!has(key)) return def;
    const json& v = obj_.at(key);
    if (!v.is_number()) {
      error(key, "expected a number");
      return def;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x) || !ok(x)) {
      error(key, std::string("must be ") + requirement);
      return def;
    }
    return x;
  }

  std::string str(const std::string& key, const std::string& def, const std::vector<std::string>& allowed) {
    seen_.insert(key);
    if (!has(key)) return def;
    const json& v = obj_.at(key);
    if (!v.is_string()) {
      error(key, "expected a string");
      return def;
    }
    auto s = v.get<std::string>();
    if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      error(key, "must be one of {" + list + "}, got \"" + s + "\"");
      return def;
    }
    return s;
  }

  std::vector<std::size_t> uint_list(const std::string& key, std::vector<std::size_t> def, std::size_t min,
                                     std::size_t max) {
    seen_.insert(key);
    if (!has(key)) return def;
    const json& v = obj_.at(key);
    if (!v.is_array() || v.empty()) {
      error(key, "expected a non-empty array of integers");
      return def;
    }
    std::vector<std::size_t> out;
    for (const json& e : v) {
      if (!e.is_number_unsigned() || e.get<std::size_t>() < min || e.get<std::size_t>() > max) {
        error(key, "entries must be integers in [" + std::to_string(min) + ", " + std::to_string(max) + "]");
        return def;
      }
      out.push_back(e.get<std::size_t>());
    }
    return out;
  }

  std::vector<std::string> str_list(const std::string& key, std::vector<std::string> def,
                                    const std::vector<std::string>& allowed) {
    seen_.insert(key);
    if (!has(key)) return def;
    const json& v = obj_.at(key);
    if (!v.is_array() || v.empty()) {
      error(key, "expected a non-empty array of strings");
      return def;
    }
    std::vector<std::string> out;
    for (const json& e : v) {
      if (!e.is_string() || std::find(allowed.begin(), allowed.end(), e.get<std::string>()) == allowed.end()) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        error(key, "entries must be one of {" + list + "}");
        return def;
      }
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  /// Nested object reader; a missing key yields an empty object.
  Reader child(const std::string& key) {
    seen_.insert(key);
    static const json kEmpty = json::object();
    if (!has(key)) return Reader(kEmpty, diag_, anchor_, qualified(key));
    const json& v = obj_.at(key);
    const std::size_t pos = diag_.text.find("\"" + key + "\"", anchor_);
    if (!v.is_object()) {
      error(key, "expected an object");
      return Reader(kEmpty, diag_, anchor_, qualified(key));
    }
    return Reader(v, diag_, pos == std::string::npos ? anchor_ : pos, qualified(key));
  }

  void mark(const std::string& key) { seen_.insert(key); }

  /// Reports keys that no getter consumed.
  void finish() {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) error(it.key(), "unknown key");
    }
  }

 private:
  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& obj_;
  Diagnostics& diag_;
  std::size_t anchor_;
  std::string path_;
  std::set<std::string> seen_;
};

bool positive(double x) { return x > 0.0; }
bool non_negative(double x) { return x >= 0.0; }
bool any_real(double) { return true; }

constexpr std::size_t kMaxCount = 1'000'000;

void read_grid(Reader& r, Spec& s, std::size_t bins, double min, double max) {
  Reader g = r.child("grid");
  s.grid_bins = g.uint("bins", bins, 2, 1 << 20);
  s.grid_min = g.real("min", min, any_real, "finite");
  s.grid_max = g.real("max", max, any_real, "finite");
  if (s.grid_max <= s.grid_min) g.error("max", "must exceed grid.min");
  g.finish();
}

void read_kernel(Reader& r, Spec& s, std::size_t width) {
  Reader k = r.child("kernel");
  const std::string type = k.str("type", "random", {"random", "gaussian", "delta"});
  s.kernel.type = type == "random" ? KernelConfig::Type::Random
                  : type == "gaussian" ? KernelConfig::Type::Gaussian
                                       : KernelConfig::Type::Delta;
  s.kernel.width_bins = k.uint("width_bins", width, 1, 1 << 16);
  s.kernel.sigma_bins = k.real("sigma_bins", 1.0, positive, "> 0");
  k.finish();
}

void read_prior(Reader& r, Spec& s, std::size_t width) {
  Reader p = r.child("prior");
  s.prior_width = p.uint("width_bins", width, 1, 1 << 20);
  p.finish();
  if (s.prior_width > s.grid_bins) r.error("prior", "width_bins exceeds grid.bins");
}

void read_kind(Kind kind, Reader& r, Spec& s, const std::filesystem::path& source) {
  switch (kind) {
    case Kind::Chain:
      read_grid(r, s, 1024, -32, 31);
      read_kernel(r, s, 12);
      read_prior(r, s, 16);
      s.iterations = r.uint("iterations", 30, 1, kMaxCount);
      s.variables = r.uint("variables", 13, 2, kMaxCount);
      s.prior_positions = r.uint_list("prior_positions", {0, s.variables - 1}, 0, s.variables - 1);
      break;
    case Kind::Tree:
      read_grid(r, s, 1024, -32, 31);
      read_kernel(r, s, 12);
      read_prior(r, s, 16);
      s.iterations = r.uint("iterations", 30, 1, kMaxCount);
      s.depth = r.uint("depth", 6, 1, 20);
      s.branching = r.uint("branching", 2, 1, 64);
      if (std::pow(double(s.branching), double(s.depth)) > 1e6) r.error("depth", "tree would exceed 10^6 leaves");
      break;
    case Kind::Star:
      read_grid(r, s, 1024, -32, 31);
      read_kernel(r, s, 12);
      read_prior(r, s, 30);
      s.iterations = r.uint("iterations", 30, 1, kMaxCount);
      s.degree = r.uint("degree", 3, 1, 100000);
      break;
    case Kind::Grid:
      read_grid(r, s, 1024, -32, 31);
      read_kernel(r, s, 12);
      read_prior(r, s, 16);
      s.iterations = r.uint("iterations", 30, 1, kMaxCount);
      s.rows = r.uint("rows", 4, 1, 10000);
      s.cols = r.uint("cols", 4, 1, 10000);
      if (s.rows * s.cols < 2) r.error("rows", "grid needs at least two variables");
      s.prior_positions = r.uint_list("prior_positions", {0}, 0, s.rows * s.cols - 1);
      break;
    case Kind::PriorSweep: {
      read_grid(r, s, 128, 0, 63);
      read_kernel(r, s, 8);
      s.iterations = r.uint("iterations", 20, 1, kMaxCount);
      s.variables = r.uint("variables", 20, 2, kMaxCount);
      s.widths = r.uint_list("widths", {1, 2, 4, 8, 16, 32, 64, 128}, 1, s.grid_bins);
      const std::string shape = r.str("prior_shape", "box", {"box", "skew-bump"});
      s.shape = shape == "box" ? PriorShape::Box : PriorShape::SkewBump;
      s.generative_placement = r.str("placement", "centered", {"centered", "generative"}) == "generative";
      break;
    }
    case Kind::DegreeSweep: {
      read_grid(r, s, 1024, -32, 31);
      read_kernel(r, s, 12);
      read_prior(r, s, 30);
      s.iterations = r.uint("iterations", 30, 1, kMaxCount);
      Reader d = r.child("degrees");
      s.degree_first = d.uint("first", 3, 1, 100000);
      s.degree_last = d.uint("last", 11, 1, 100000);
      if (s.degree_last < s.degree_first) d.error("last", "degree range is empty");
      d.finish();
      break;
    }
    case Kind::ConvergenceRate:
      read_grid(r, s, 1024, -32, 31);
      read_kernel(r, s, 12);
      s.depth = r.uint("depth", 16, kMinDecayDepth, 100000);
      s.iterations = r.uint("iterations", s.depth, s.depth, kMaxCount);
      break;
    case Kind::TreeEquivalence:
      read_grid(r, s, 1024, -32, 31);
      read_kernel(r, s, 12);
      read_prior(r, s, 16);
      s.graphs = r.str_list("graphs", {"cycle3", "grid4x4"}, {"cycle3", "grid4x4"});
      s.iteration_list = r.uint_list("iterations", {1, 2, 3}, 1, 12);
      break;
    case Kind::Stereo: {
      Reader src = r.child("source");
      s.middlebury = src.str("type", "synthetic", {"synthetic", "middlebury"}) == "middlebury";
      if (s.middlebury) {
        const std::string dir = src.str("dir", "", {});
        if (dir.empty()) {
          src.error("type", "middlebury source needs \"dir\"");
        } else {
          std::filesystem::path p(dir);
          if (p.is_relative() && !source.empty()) p = source.parent_path() / p;
          s.middlebury_dir = p;
          if (!std::filesystem::is_directory(p)) src.error("dir", "directory not found: " + p.string());
        }
      } else {
        s.synthetic_disparity = src.uint("disparity", 3, 0, 1000);
        s.min_block = src.uint("min_block", 3, 1, 1000);
        s.max_block = src.uint("max_block", 8, 1, 1000);
        if (s.max_block < s.min_block) src.error("max_block", "must be >= min_block");
      }
      src.finish();
      Reader desk = r.child("desk_size");
      s.desk_width = desk.uint("width", 60, 1, 100000);
      s.desk_height = desk.uint("height", 50, 1, 100000);
      desk.finish();
      Reader full = r.child("full_size");
      s.full_width = full.uint("width", 200, 1, 100000);
      s.full_height = full.uint("height", 150, 1, 100000);
      full.finish();
      const std::size_t patch = r.uint("patch_size", 5, 1, 101);
      if (patch % 2 == 0) r.error("patch_size", "must be odd, got " + std::to_string(patch));
      s.patch_size = static_cast<int>(patch);
      s.lambda = r.real("lambda", 0.002, positive, "> 0");
      s.edge_threshold = r.real("edge_threshold", 3.0, non_negative, ">= 0");
      s.edge_scale = r.real("edge_scale", 1.0, positive, "> 0");
      s.disparity_max = r.uint("disparity_max", 8, 1, 1024);
      if (!s.middlebury && s.synthetic_disparity > s.disparity_max) {
        r.error("disparity_max", "must cover the synthetic disparity");
      }
      s.smoothing_sigma = r.real("smoothing_sigma", 1.0, positive, "> 0");
      s.iterations = r.uint("iterations", 100, 1, kMaxCount);
      s.cost = r.str("cost", "sad", {"sad", "ssd"}) == "sad" ? MatchingCost::SAD : MatchingCost::SSD;
      s.projection = r.str("projection", "moment", {"moment", "laplace"}) == "moment" ? Projection::Moment
                                                                                     : Projection::Laplace;
      s.engines.clear();
      for (const auto& e : r.str_list("engines", {"bp", "gbp"}, {"bp", "gbp"})) {
        s.engines.push_back(e == "bp" ? Engine::BP : Engine::GBP);
      }
      break;
    }
  }
}

// ---------------------------------------------------------------------------
// Experiment bodies.

KernelSpec kernel_spec(const Spec& s, std::uint64_t seed) {
  switch (s.kernel.type) {
    case KernelConfig::Type::Random:
      return KernelSpec::random(s.kernel.width_bins, derive_seed(seed, kKernelStream));
    case KernelConfig::Type::Gaussian:
      return KernelSpec::gaussian(s.kernel.sigma_bins);
    case KernelConfig::Type::Delta:
      break;
  }
  return KernelSpec::fixed_kernel(Kernel::delta(0));
}

// k-th random prior of a seed; independent of how many priors the graph has.
DiscreteDist nth_prior(const Spec& s, std::uint64_t seed, std::size_t k, const Grid& grid) {
  return random_potential({s.prior_width, derive_seed(derive_seed(seed, kPriorStream), k)}, grid);
}

std::string num(std::size_t x) { return std::to_string(x); }

BeliefSet final_beliefs(const FactorGraph& g, std::size_t iterations) {
  BpOptions options;
  options.iterations = iterations;
  options.record_summaries = false;
  return run_sync(g, options).beliefs;
}

// Rows keyed by distance to the nearest prior, averaging the variables at
// that distance.
Table distance_table(const FactorGraph& g, const BeliefSet& beliefs) {
  const auto dist = distance_to_nearest_prior(g);
  std::map<std::size_t, std::vector<CumulantSummary>> by_distance;
  for (VariableId v = 0; v < g.num_variables(); ++v) {
    if (dist[v] == SIZE_MAX) continue;
    by_distance[dist[v]].push_back(summarize(beliefs[v]));
  }
  Table t;
  t.key_columns = {"distance"};
  t.value_columns = {"n_vars", "kl", "eps", "skew", "exkurt", "var"};
  for (const auto& [d, list] : by_distance) {
    double kl = 0, eps = 0, skew = 0, exkurt = 0, var = 0;
    for (const auto& s : list) {
      kl += s.kl_gauss;
      eps += s.eps;
      skew += s.skew;
      exkurt += s.exkurt;
      var += s.var;
    }
    const double n = static_cast<double>(list.size());
    t.add({num(d)}, {n, kl / n, eps / n, skew / n, exkurt / n, var / n});
  }
  return t;
}

SeedResult run_graph_experiment(const ExperimentConfig& cfg, std::uint64_t seed) {
  const Spec& s = cfg.spec;
  const Grid grid = s.grid();
  const KernelSpec kernels = kernel_spec(s, seed);
  FactorGraph g(grid);
  switch (cfg.kind) {
    case Kind::Chain: {
      PriorList priors;
      for (std::size_t k = 0; k < s.prior_positions.size(); ++k) priors.emplace_back(s.prior_positions[k], nth_prior(s, seed, k, grid));
      g = build_chain(s.variables, priors, kernels, grid);
      break;
    }
    case Kind::Tree: {
      std::vector<DiscreteDist> leaves;
      const std::size_t n = tree_leaf_count(s.depth, s.branching);
      for (std::size_t k = 0; k < n; ++k) leaves.push_back(nth_prior(s, seed, k, grid));
      g = build_tree(s.depth, s.branching, leaves, kernels, grid);
      break;
    }
    case Kind::Star: {
      std::vector<DiscreteDist> outer;
      for (std::size_t k = 0; k < s.degree; ++k) outer.push_back(nth_prior(s, seed, k, grid));
      g = build_star(s.degree, outer, kernels, grid);
      break;
    }
    case Kind::Grid: {
      PriorList priors;
      for (std::size_t k = 0; k < s.prior_positions.size(); ++k) priors.emplace_back(s.prior_positions[k], nth_prior(s, seed, k, grid));
      g = build_grid_graph(s.rows, s.cols, priors, kernels, grid);
      break;
    }
    default:
      throw Error("run_graph_experiment: unsupported kind");
  }
  return {seed, distance_table(g, final_beliefs(g, s.iterations)), {}};
}

SeedResult run_degree_sweep(const ExperimentConfig& cfg, std::uint64_t seed) {
  const Spec& s = cfg.spec;
  const Grid grid = s.grid();
  const KernelSpec kernels = kernel_spec(s, seed);
  Table t;
  t.key_columns = {"degree"};
  t.value_columns = {"eps", "kl", "skew", "exkurt", "kappa5", "kappa6", "var"};
  for (std::size_t n = s.degree_first; n <= s.degree_last; ++n) {
    std::vector<DiscreteDist> outer;
    for (std::size_t k = 0; k < n; ++k) outer.push_back(nth_prior(s, seed, k, grid));
    const FactorGraph g = build_star(n, outer, kernels, grid);
    const CumulantSummary c = summarize(final_beliefs(g, s.iterations)[0]);
    t.add({num(n)}, {c.eps, c.kl_gauss, c.skew, c.exkurt, c.kappa_hat(5), c.kappa_hat(6), c.var});
  }
  return {seed, std::move(t), {}};
}

std::size_t sample_index(Rng& rng, const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return weights.size() - 1;
}

double shape_variance_bins(PriorShape shape, std::size_t width) {
  const auto w = prior_shape_weights(shape, width);
  double total = 0, m1 = 0, m2 = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    total += w[i];
    m1 += w[i] * double(i);
    m2 += w[i] * double(i) * double(i);
  }
  m1 /= total;
  return m2 / total - m1 * m1;
}

SeedResult run_prior_sweep(const ExperimentConfig& cfg, std::uint64_t seed) {
  const Spec& s = cfg.spec;
  const Grid grid = s.grid();
  const KernelSpec kernels = kernel_spec(s, seed);
  const std::size_t n = s.variables;

  std::vector<Kernel> ks;
  double sigma_e2 = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    ks.push_back(kernels.make(i));
    sigma_e2 += ks.back().variance_bins();
  }
  sigma_e2 = sigma_e2 / double(n - 1) * grid.step() * grid.step();

  // Ground-truth trajectory: start mid-grid, then one draw per kernel.
  std::vector<std::ptrdiff_t> truth(n);
  {
    Rng rng(derive_seed(seed, kPlacementStream));
    truth[0] = static_cast<std::ptrdiff_t>(grid.midpoint());
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto& offsets = ks[i].offsets();
      const std::vector<double> w(ks[i].weights().begin(), ks[i].weights().end());
      const std::ptrdiff_t next = truth[i] + offsets[sample_index(rng, w)];
      truth[i + 1] = std::clamp<std::ptrdiff_t>(next, 0, static_cast<std::ptrdiff_t>(grid.size()) - 1);
    }
  }

  Table t;
  t.key_columns = {"width"};
  t.value_columns = {"sigma_p2", "normalized_variance", "R", "kl_last", "eps_last", "kl_mean", "eps_mean"};
  const double range = grid.max() - grid.min();
  for (std::size_t w : s.widths) {
    const auto shape = prior_shape_weights(s.shape, w);
    Rng rng(derive_seed(derive_seed(seed, kPlacementStream), w));
    PriorList priors;
    for (std::size_t i = 0; i < n; ++i) {
      const std::ptrdiff_t start = s.generative_placement
                                       ? truth[i] - static_cast<std::ptrdiff_t>(sample_index(rng, shape))
                                       : static_cast<std::ptrdiff_t>(grid.midpoint()) - static_cast<std::ptrdiff_t>(w / 2);
      priors.emplace_back(i, shaped_window(s.shape, w, start, grid));
    }
    const FactorGraph g = build_chain(n, priors, kernels, grid);
    const BeliefSet beliefs = final_beliefs(g, s.iterations);
    double kl_mean = 0, eps_mean = 0;
    for (const auto& b : beliefs) {
      const CumulantSummary c = summarize(b);
      kl_mean += c.kl_gauss;
      eps_mean += c.eps;
    }
    const CumulantSummary last = summarize(beliefs.back());
    const double sigma_p2 = shape_variance_bins(s.shape, w) * grid.step() * grid.step();
    t.add({num(w)}, {sigma_p2, sigma_p2 / (range * range), sigma_p2 / sigma_e2, last.kl_gauss, last.eps,
                     kl_mean / double(n), eps_mean / double(n)});
  }
  return {seed, std::move(t), {}};
}

SeedResult run_convergence_rate(const ExperimentConfig& cfg, std::uint64_t seed) {
  const Spec& s = cfg.spec;
  const Grid grid = s.grid();
  const Kernel k = kernel_spec(s, seed).make(0);
  const PriorList priors{{0, DiscreteDist::delta(grid, grid.midpoint())}};
  const FactorGraph g = build_chain(s.depth + 1, priors, KernelSpec::fixed_kernel(k), grid);
  const BeliefSet beliefs = final_beliefs(g, s.iterations);

  std::vector<CumulantSummary> by_depth;
  Table t;
  t.key_columns = {"depth"};
  t.value_columns = {"skew", "abs_skew", "exkurt", "eps", "kl"};
  for (std::size_t d = 0; d <= s.depth; ++d) {
    by_depth.push_back(summarize(beliefs[d]));
    const auto& c = by_depth.back();
    t.add({num(d)}, {c.skew, std::abs(c.skew), c.exkurt, c.eps, c.kl_gauss});
  }
  const DecayFit fit = decay_rate_fit(by_depth);
  std::ostringstream out;
  CsvWriter csv(out);
  csv.header({"seed", "first_depth", "last_depth", "kappa3_slope", "kl_slope"});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  csv << static_cast<unsigned long long>(seed) << fit.first_depth << fit.last_depth << fit.kappa3_slope.value_or(nan)
      << fit.kl_slope.value_or(nan);
  csv.end_row();
  return {seed, std::move(t), {{"fit_seed_" + std::to_string(seed) + ".csv", out.str()}}};
}

FactorGraph equivalence_graph(const std::string& name, const Spec& s, std::uint64_t seed) {
  const Grid grid = s.grid();
  const KernelSpec kernels = kernel_spec(s, seed);
  if (name == "cycle3") {
    FactorGraph g(grid);
    g.add_variables(3);
    g.add_binary(0, 1, kernels.make(0));
    g.add_binary(1, 2, kernels.make(1));
    g.add_binary(2, 0, kernels.make(2));
    for (std::size_t v = 0; v < 3; ++v) g.add_unary(v, nth_prior(s, seed, v, grid));
    return g;
  }
  PriorList priors;
  for (std::size_t v = 0; v < 16; ++v) priors.emplace_back(v, nth_prior(s, seed, v, grid));
  return build_grid_graph(4, 4, priors, kernels, grid);
}

SeedResult run_tree_equivalence(const ExperimentConfig& cfg, std::uint64_t seed) {
  const Spec& s = cfg.spec;
  Table t;
  t.key_columns = {"graph", "iterations"};
  t.value_columns = {"tree_variables", "linf"};
  for (const auto& name : s.graphs) {
    const FactorGraph g = equivalence_graph(name, s, seed);
    for (std::size_t n : s.iteration_list) {
      const auto tree = unwrap_computation_tree(g, 0, n);
      t.add({name, num(n)}, {double(tree.graph.num_variables()), check_tree_equivalence(g, 0, n)});
    }
  }
  return {seed, std::move(t), {}};
}

std::string pgm_bytes(const GrayImage& img) {
  std::ostringstream out;
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
  return out.str();
}

SeedResult run_stereo_experiment(const ExperimentConfig& cfg, std::uint64_t seed, const RunOptions& options) {
  const Spec& s = cfg.spec;
  const ImagePair pair = stereo_pair(cfg, seed, options.full_scale);
  const StereoConfig sc = stereo_config(cfg, seed);

  SeedResult result;
  result.seed = seed;
  result.table.key_columns = {"iteration"};
  std::vector<StereoReport> reports;
  for (Engine e : s.engines) {
    reports.push_back(run_stereo(pair, sc, e));
    result.table.value_columns.push_back("mse_" + engine_name(e));
  }
  for (std::size_t it = 0; it <= s.iterations; ++it) {
    std::vector<double> values;
    for (const auto& r : reports) values.push_back(r.mse_trace.at(it));
    result.table.add({num(it)}, values);
  }

  const std::string prefix = "stereo_seed_" + std::to_string(seed) + "_";
  json summary = json::object();
  summary["seed"] = seed;
  summary["width"] = pair.width();
  summary["height"] = pair.height();
  summary["iterations"] = s.iterations;
  for (const auto& r : reports) {
    const std::string name = engine_name(r.engine);
    std::ostringstream pixels;
    write_pixel_csv(pixels, r);
    result.artifacts.push_back({prefix + name + "_pixels.csv", pixels.str()});
    result.artifacts.push_back({prefix + name + "_disparity.pgm", pgm_bytes(disparity_image(r, double(s.disparity_max)))});
    json e = json::object();
    e["final_mse"] = r.mse.value_or(std::numeric_limits<double>::quiet_NaN());
    if (r.engine == Engine::BP) {
      const QuartileFractions q = kl_fraction_by_prior_quartile(r);
      e["kl_below_0.02_bottom_prior_var_quartile"] = q.bottom;
      e["kl_below_0.02_top_prior_var_quartile"] = q.top;
    }
    summary[name] = e;
  }
  result.artifacts.push_back({prefix + "summary.json", summary.dump(2) + "\n"});
  return result;
}

}  // namespace

const std::vector<KindInfo>& experiment_kinds() { return kKinds; }

std::optional<Kind> parse_kind(const std::string& name) {
  for (const auto& k : kKinds) {
    if (name == k.name) return k.kind;
  }
  return std::nullopt;
}

std::string kind_name(Kind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k.name;
  }
  return "?";
}

void Table::add(std::vector<std::string> keys, std::vector<double> values) {
  rows.push_back({std::move(keys), std::move(values)});
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what(), line_at(text, e.byte == 0 ? 0 : e.byte - 1));
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object", 1);

  Diagnostics diag{text, {}};
  Reader r(doc, diag, 0, "");
  ExperimentConfig cfg;
  cfg.source = source;
  cfg.raw = doc;

  r.mark("comment");
  const std::string kind = r.str("experiment", "", {});
  const auto parsed = parse_kind(kind);
  if (!r.has("experiment")) {
    diag.add(1, "missing required key \"experiment\"");
  } else if (!parsed) {
    std::string list;
    for (const auto& k : kKinds) list += (list.empty() ? "" : ", ") + std::string(k.name);
    r.error("experiment", "unknown experiment \"" + kind + "\"; expected one of {" + list + "}");
  }
  cfg.kind = parsed.value_or(Kind::Chain);
  const std::string stem = source.empty() ? kind : source.stem().string();
  cfg.name = r.str("name", stem.empty() ? "experiment" : stem, {});
  if (cfg.name.empty() || cfg.name.find_first_of("/\\") != std::string::npos || cfg.name == "." || cfg.name == "..") {
    r.error("name", "must be a plain directory name");
  }

  Reader seeds = r.child("seeds");
  cfg.seeds.first = seeds.u64("first", 42);
  cfg.seeds.last = seeds.u64("last", cfg.seeds.first);
  if (cfg.seeds.last < cfg.seeds.first) seeds.error("last", "seed range is empty (last < first)");
  if (cfg.seeds.last - cfg.seeds.first >= kMaxCount) seeds.error("last", "seed range too large");
  seeds.finish();

  if (parsed) read_kind(cfg.kind, r, cfg.spec, source);
  r.finish();

  if (!diag.items.empty()) {
    std::stable_sort(diag.items.begin(), diag.items.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::string msg = diag.items.front().second;
    for (std::size_t i = 1; i < diag.items.size(); ++i) {
      msg += "\nline " + std::to_string(diag.items[i].first) + ": " + diag.items[i].second;
    }
    throw ConfigError(msg, diag.items.front().first);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

ImagePair stereo_pair(const ExperimentConfig& cfg, std::uint64_t seed, bool full_scale) {
  const Spec& s = cfg.spec;
  const std::size_t w = full_scale ? s.full_width : s.desk_width;
  const std::size_t h = full_scale ? s.full_height : s.desk_height;
  if (s.middlebury) {
    ImagePair pair = fit_pair(load_middlebury(s.middlebury_dir), w, h);
    if (!pair.ground_truth) throw DecodeError(s.middlebury_dir.string() + ": ground-truth disparity missing");
    return pair;
  }
  return synthetic_shift_pair(w, h, s.synthetic_disparity, derive_seed(seed, kImageStream), s.min_block, s.max_block);
}

StereoConfig stereo_config(const ExperimentConfig& cfg, std::uint64_t seed) {
  const Spec& s = cfg.spec;
  StereoConfig sc;
  sc.patch_size = s.patch_size;
  sc.lambda = s.lambda;
  sc.edge_threshold = s.edge_threshold;
  sc.edge_scale = s.edge_scale;
  sc.disparity_grid = Grid(s.disparity_max + 1, 0.0, double(s.disparity_max));
  sc.smoothing_kernel = Kernel::gaussian(s.smoothing_sigma);
  sc.iterations = s.iterations;
  sc.seed = seed;
  sc.cost = s.cost;
  sc.gbp_projection = s.projection;
  return sc;
}

SeedResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed, const RunOptions& options) {
  switch (cfg.kind) {
    case Kind::Chain:
    case Kind::Tree:
    case Kind::Star:
    case Kind::Grid:
      return run_graph_experiment(cfg, seed);
    case Kind::PriorSweep:
      return run_prior_sweep(cfg, seed);
    case Kind::DegreeSweep:
      return run_degree_sweep(cfg, seed);
    case Kind::ConvergenceRate:
      return run_convergence_rate(cfg, seed);
    case Kind::TreeEquivalence:
      return run_tree_equivalence(cfg, seed);
    case Kind::Stereo:
      return run_stereo_experiment(cfg, seed, options);
  }
  throw Error("run_seed: unknown experiment kind");
}

std::string seed_csv(const SeedResult& result) {
  std::ostringstream out;
  CsvWriter csv(out);
  csv << "seed";
  for (const auto& k : result.table.key_columns) csv << k;
  for (const auto& v : result.table.value_columns) csv << v;
  csv.end_row();
  for (const auto& row : result.table.rows) {
    csv << static_cast<unsigned long long>(result.seed);
    for (const auto& k : row.keys) csv << k;
    for (double v : row.values) csv << v;
    csv.end_row();
  }
  return out.str();
}

std::string aggregate_csv(const std::vector<SeedResult>& results) {
  if (results.empty()) throw Error("aggregate_csv: no seeds");
  const Table& first = results.front().table;
  for (const auto& r : results) {
    if (r.table.key_columns != first.key_columns || r.table.value_columns != first.value_columns ||
        r.table.rows.size() != first.rows.size()) {
      throw Error("aggregate_csv: seed " + std::to_string(r.seed) + " has a different table layout");
    }
    for (std::size_t i = 0; i < first.rows.size(); ++i) {
      if (r.table.rows[i].keys != first.rows[i].keys) {
        throw Error("aggregate_csv: seed " + std::to_string(r.seed) + " has different row keys");
      }
    }
  }
  std::ostringstream out;
  CsvWriter csv(out);
  for (const auto& k : first.key_columns) csv << k;
  for (const auto& v : first.value_columns) {
    csv << v + "_mean";
    csv << v + "_std";
  }
  csv << "n_seeds";
  csv.end_row();
  const double n = static_cast<double>(results.size());
  for (std::size_t i = 0; i < first.rows.size(); ++i) {
    for (const auto& k : first.rows[i].keys) csv << k;
    for (std::size_t j = 0; j < first.value_columns.size(); ++j) {
      double mean = 0.0;
      for (const auto& r : results) mean += r.table.rows[i].values[j];
      mean /= n;
      double ss = 0.0;
      for (const auto& r : results) ss += (r.table.rows[i].values[j] - mean) * (r.table.rows[i].values[j] - mean);
      csv << mean << (results.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0);
    }
    csv << results.size();
    csv.end_row();
  }
  return out.str();
}

RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RunSummary summary;
  summary.directory = options.out_dir / cfg.name;
  std::filesystem::create_directories(summary.directory);

  const std::size_t n = cfg.seeds.count();
  std::vector<SeedResult> results(n);
  detail::parallel_for(n, std::max<std::size_t>(1, options.threads), [&](std::size_t i) {
    results[i] = run_seed(cfg, cfg.seeds.first + i, options);
    write_file_atomic(summary.directory / ("seed_" + std::to_string(results[i].seed) + ".csv"), seed_csv(results[i]));
    for (const auto& a : results[i].artifacts) write_file_atomic(summary.directory / a.file, a.contents);
  });
  for (const auto& r : results) {
    summary.files.push_back(summary.directory / ("seed_" + std::to_string(r.seed) + ".csv"));
    for (const auto& a : r.artifacts) summary.files.push_back(summary.directory / a.file);
  }
  write_file_atomic(summary.directory / "aggregate.csv", aggregate_csv(results));
  summary.files.push_back(summary.directory / "aggregate.csv");

  summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json manifest = json::object();
  manifest["name"] = cfg.name;
  manifest["experiment"] = kind_name(cfg.kind);
  manifest["version"] = GAUSSBP_VERSION;
  manifest["seeds"] = {{"first", cfg.seeds.first}, {"last", cfg.seeds.last}};
  manifest["full_scale"] = options.full_scale;
  manifest["threads"] = options.threads;
  manifest["wall_seconds"] = summary.wall_seconds;
  json files = json::array();
  for (const auto& f : summary.files) files.push_back(f.filename().string());
  manifest["files"] = files;
  manifest["config"] = cfg.raw;
  write_file_atomic(summary.directory / "manifest.json", manifest.dump(2) + "\n");
  summary.files.push_back(summary.directory / "manifest.json");
  return summary;
}

}  // namespace gaussbp::exp
