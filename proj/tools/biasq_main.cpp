// biasq: command-line driver for the biased Q-learning trading experiments.
//
//   biasq run    --config cfg.json  [--seed N] [--out DIR] [--resample-per-epoch] [--plots]
//   biasq grid  [--config grid.json] [--seed N] [--out DIR] [--parallel N] [--resample-per-epoch] [--plots]
//   biasq verify [--seed N] [--out DIR]
//   biasq plot   --input results.csv [--out DIR]
//
// Exit status: 0 on success, 1 when a verification claim fails, 2 on any error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <fmt/format.h>

#include "CLI11.hpp"

#include "biasq/claims.hpp"
#include "biasq/config_io.hpp"
#include "biasq/harness.hpp"
#include "biasq/plot.hpp"
#include "biasq/results_io.hpp"

namespace fs = std::filesystem;
using namespace biasq;

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", p.string()));
  return out;
}

int cmd_run(const fs::path& config, std::optional<std::uint64_t> seed, const fs::path& out_dir, bool resample,
            bool plots) {
  ExperimentConfig cfg = load_config(config);
  if (seed) cfg.run_seed = *seed;
  if (resample) cfg.resample_per_epoch = true;

  const RunResult result = run_experiment(cfg, "run:" + fs::path(config).stem().string());
  const auto files = emit_results(std::span(&result, 1), out_dir);
  {
    auto out = open_out(out_dir / "qtable.csv");
    write_csv(result.q, cfg.actions(), out);
  }
  {
    auto out = open_out(out_dir / "prices.csv");
    write_csv(generate_prices(epoch_data_seed(cfg, 0), cfg.steps, cfg.p0, cfg.sigma), out);
  }
  {
    auto out = open_out(out_dir / "config.json");
    out << to_json(cfg).dump(2) << '\n';
  }
  if (plots) plot_results(files.long_csv, out_dir);

  const TailSummary t = tail_summary(result);
  fmt::print("{}: {} epochs in {:.3f}s; last {} epochs sharpe {:.4f} +/- {:.4f}, return {:.4f} +/- {:.4f}\n",
             result.config_id, result.epochs.size(), result.wall_seconds, t.epochs, t.sharpe_mean, t.sharpe_std,
             t.return_mean, t.return_std);
  fmt::print("wrote {} and {}\n", files.long_csv.string(), files.summary_csv.string());
  return 0;
}

int cmd_grid(const std::optional<fs::path>& config, std::optional<std::uint64_t> seed, const fs::path& out_dir,
             std::size_t parallel, bool resample, bool plots) {
  GridSpec grid = config ? load_grid(*config) : ablation_grid();
  if (seed) grid.master_seed = *seed;
  if (resample) grid.base.resample_per_epoch = true;

  const auto results = run_grid(grid, parallel);
  const auto files = emit_results(results, out_dir);
  if (plots) plot_results(files.long_csv, out_dir);

  for (const auto& r : results) {
    const TailSummary t = tail_summary(r);
    fmt::print("{:<44} sharpe {:>8.4f}  return {:>10.4f}\n", r.config_id, t.sharpe_mean, t.return_mean);
  }
  fmt::print("{} configurations; wrote {} and {}\n", results.size(), files.long_csv.string(),
             files.summary_csv.string());
  return 0;
}

int cmd_verify(std::uint64_t seed, const std::optional<fs::path>& out_dir) {
  const auto results = claims::run_all(seed);
  claims::write_text(results, std::cout);
  if (out_dir) {
    fs::create_directories(*out_dir);
    auto csv = open_out(*out_dir / "verify.csv");
    claims::write_csv(results, csv);
    auto txt = open_out(*out_dir / "verify.txt");
    claims::write_text(results, txt);
  }
  const bool ok = claims::all_passed(results);
  fmt::print("{}\n", ok ? "all claims hold" : "verification FAILED");
  return ok ? 0 : 1;
}

int cmd_plot(const fs::path& input, const fs::path& out_dir) {
  for (const auto& p : plot_results(input, out_dir)) fmt::print("wrote {}\n", p.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Biased tabular Q-learning on a synthetic random-walk market"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out = "out";
  std::string input;
  std::size_t parallel = 1;
  bool resample = false;
  bool plots = false;

  auto* run = app.add_subcommand("run", "Run one experiment config");
  run->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override run_seed");
  run->add_option("--out", out, "Output directory");
  run->add_flag("--resample-per-epoch", resample, "Draw a fresh price path each epoch");
  run->add_flag("--plots", plots, "Also write SVG charts");

  auto* grid = app.add_subcommand("grid", "Run a grid of experiments (built-in ablation grid by default)");
  grid->add_option("--config", config, "Grid spec (JSON)")->check(CLI::ExistingFile);
  grid->add_option("--seed", seed, "Override the grid master seed");
  grid->add_option("--out", out, "Output directory");
  grid->add_option("--parallel", parallel, "Worker threads")->check(CLI::PositiveNumber);
  grid->add_flag("--resample-per-epoch", resample, "Draw a fresh price path each epoch");
  grid->add_flag("--plots", plots, "Also write SVG charts");

  auto* verify = app.add_subcommand("verify", "Check the theoretical claims numerically");
  verify->add_option("--seed", seed, "Seed for the randomized checks");
  verify->add_option("--out", out, "Also write verify.csv and verify.txt here");

  auto* plot = app.add_subcommand("plot", "Render SVG charts from a results CSV");
  plot->add_option("--input", input, "Long-format results CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config, seed, out, resample, plots);
    if (grid->parsed()) {
      return cmd_grid(config.empty() ? std::nullopt : std::optional<fs::path>(config), seed, out, parallel, resample,
                      plots);
    }
    if (verify->parsed()) {
      const bool has_out = verify->count("--out") > 0;
      return cmd_verify(seed.value_or(0), has_out ? std::optional<fs::path>(out) : std::nullopt);
    }
    if (plot->parsed()) return cmd_plot(input, out);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
  return 2;
}
