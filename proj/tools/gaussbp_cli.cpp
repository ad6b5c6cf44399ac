#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "experiment.hpp"
#include "gaussbp/error.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInference = 3;

std::filesystem::path default_out_dir() {
  if (const char* env = std::getenv("GAUSSBP_OUT_DIR"); env && *env) return env;
  return "results";
}

int report_config_error(const std::string& path, const gaussbp::ConfigError& e) {
  std::cerr << path << ":" << e.what() << "\n";
  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  namespace exp = gaussbp::exp;
  CLI::App app{"gaussbp: Gaussian emergence experiments for loopy belief propagation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::size_t threads = 1;
  bool full_scale = false;

  auto* run = app.add_subcommand("run", "Run an experiment config and write CSV/JSON artifacts");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (default: $GAUSSBP_OUT_DIR or ./results)");
  run->add_option("--threads", threads, "Worker threads across seeds")->check(CLI::PositiveNumber);
  run->add_flag("--full-scale", full_scale, "Stereo: use the full-resolution image size");

  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", config_path, "Experiment config (JSON)")->required();

  auto* list = app.add_subcommand("list-experiments", "List the experiment kinds");

  CLI11_PARSE(app, argc, argv);

  if (list->parsed()) {
    for (const auto& k : exp::experiment_kinds()) std::cout << k.name << "\t" << k.summary << "\n";
    return 0;
  }

  exp::ExperimentConfig cfg;
  try {
    cfg = exp::load_config(config_path);
  } catch (const gaussbp::ConfigError& e) {
    return report_config_error(config_path, e);
  }

  if (validate->parsed()) {
    std::cout << config_path << ": ok (" << exp::kind_name(cfg.kind) << ", " << cfg.seeds.count() << " seed"
              << (cfg.seeds.count() == 1 ? "" : "s") << ")\n";
    return 0;
  }

  exp::RunOptions options;
  options.out_dir = out_dir.empty() ? default_out_dir() : std::filesystem::path(out_dir);
  options.threads = threads;
  options.full_scale = full_scale;
  try {
    const exp::RunSummary summary = exp::run_experiment(cfg, options);
    std::cout << "wrote " << summary.files.size() << " files to " << summary.directory.string() << " in "
              << summary.wall_seconds << " s\n";
  } catch (const gaussbp::ConfigError& e) {
    return report_config_error(config_path, e);
  } catch (const gaussbp::Error& e) {
    std::cerr << "inference failed: " << e.what() << "\n";
    return kExitInference;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
