#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaussbp/builders.hpp"
#include "gaussbp/gbp.hpp"
#include "gaussbp/grid.hpp"
#include "gaussbp/stereo.hpp"

namespace gaussbp::exp {

enum class Kind { Chain, Tree, Star, Grid, PriorSweep, DegreeSweep, ConvergenceRate, TreeEquivalence, Stereo };

struct KindInfo {
  Kind kind;
  const char* name;
  const char* summary;
};

const std::vector<KindInfo>& experiment_kinds();
std::optional<Kind> parse_kind(const std::string& name);
std::string kind_name(Kind kind);

struct SeedRange {
  std::uint64_t first = 42;
  std::uint64_t last = 42;  ///< inclusive
  std::size_t count() const { return static_cast<std::size_t>(last - first + 1); }
};

struct KernelConfig {
  enum class Type { Random, Gaussian, Delta };
  Type type = Type::Random;
  std::size_t width_bins = 12;
  double sigma_bins = 1.0;
};

/// Typed settings; each kind reads only its own fields.
struct Spec {
  std::size_t grid_bins = 1024;
  double grid_min = -32.0;
  double grid_max = 31.0;
  std::size_t iterations = 30;
  KernelConfig kernel;
  std::size_t prior_width = 16;

  std::size_t variables = 13;                ///< chain, prior-sweep
  std::vector<std::size_t> prior_positions;  ///< chain, grid
  std::size_t rows = 4;                      ///< grid
  std::size_t cols = 4;
  std::size_t depth = 6;  ///< tree, convergence-rate
  std::size_t branching = 2;
  std::size_t degree = 3;  ///< star
  std::size_t degree_first = 3;  ///< degree-sweep, inclusive
  std::size_t degree_last = 11;

  std::vector<std::size_t> widths;  ///< prior-sweep
  PriorShape shape = PriorShape::Box;
  bool generative_placement = false;

  std::vector<std::string> graphs;  ///< tree-equivalence
  std::vector<std::size_t> iteration_list;

  // stereo
  bool middlebury = false;
  std::filesystem::path middlebury_dir;
  std::size_t synthetic_disparity = 3;
  std::size_t min_block = 3;
  std::size_t max_block = 8;
  std::size_t desk_width = 60;
  std::size_t desk_height = 50;
  std::size_t full_width = 200;
  std::size_t full_height = 150;
  int patch_size = 5;
  double lambda = 0.002;
  double edge_threshold = 3.0;
  double edge_scale = 1.0;
  std::size_t disparity_max = 8;
  double smoothing_sigma = 1.0;
  MatchingCost cost = MatchingCost::SAD;
  Projection projection = Projection::Moment;
  std::vector<Engine> engines{Engine::BP, Engine::GBP};

  Grid grid() const { return Grid(grid_bins, grid_min, grid_max); }
};

/// A validated configuration. `raw` keeps the parsed document for echoing
/// into the manifest.
struct ExperimentConfig {
  Kind kind = Kind::Chain;
  std::string name;
  SeedRange seeds;
  Spec spec;
  nlohmann::ordered_json raw;
  std::filesystem::path source;  ///< config file, for resolving relative paths
};

/// Parses and validates config text. Throws ConfigError carrying the line of
/// the offending token or key.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& source = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// One metrics table: key columns identify a row, value columns are
/// averaged across seeds.
struct Table {
  std::vector<std::string> key_columns;
  std::vector<std::string> value_columns;
  struct Row {
    std::vector<std::string> keys;
    std::vector<double> values;
  };
  std::vector<Row> rows;

  void add(std::vector<std::string> keys, std::vector<double> values);
};

/// Extra per-seed artifact (file name relative to the experiment directory).
struct Artifact {
  std::string file;
  std::string contents;
};

struct SeedResult {
  std::uint64_t seed = 0;
  Table table;
  std::vector<Artifact> artifacts;
};

struct RunOptions {
  std::filesystem::path out_dir = "results";
  std::size_t threads = 1;
  bool full_scale = false;
};

struct RunSummary {
  std::filesystem::path directory;
  std::vector<std::filesystem::path> files;
  double wall_seconds = 0.0;
};

/// Runs one seed of the experiment. Inference errors propagate.
SeedResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed, const RunOptions& options);

/// Runs every seed (in parallel across options.threads), writes
/// seed_<s>.csv, aggregate.csv, any artifacts and manifest.json into
/// out_dir/<name>/.
RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& options);

/// Seed-aggregated table: key columns, then <value>_mean and <value>_std
/// (sample standard deviation, 0 for a single seed), then n_seeds. Throws
/// Error if seeds disagree on the row layout.
std::string aggregate_csv(const std::vector<SeedResult>& results);

/// seed,<keys>,<values> for one seed.
std::string seed_csv(const SeedResult& result);

/// The stereo pair a stereo config describes, fitted to desk or full scale.
ImagePair stereo_pair(const ExperimentConfig& cfg, std::uint64_t seed, bool full_scale);
StereoConfig stereo_config(const ExperimentConfig& cfg, std::uint64_t seed);

}  // namespace gaussbp::exp
