#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "biasq/harness.hpp"

namespace biasq {

/// Mean and population std-dev of the metrics over a run's last epochs.
struct TailSummary {
  std::size_t epochs = 0;
  double sharpe_mean = 0.0;
  double sharpe_std = 0.0;
  double return_mean = 0.0;
  double return_std = 0.0;
};

TailSummary tail_summary(const RunResult& run, std::size_t last = 10);

/// Long format, one row per (config, epoch):
/// config_id,n_states,lambda,gamma,action_set,q_init,initial_holdings,reward,epoch,sharpe,cumulative_return,seed
void write_long_csv(std::span<const RunResult> results, std::ostream& out);

/// One row per config with the last-10-epoch TailSummary.
void write_summary_csv(std::span<const RunResult> results, std::ostream& out);

struct EmittedFiles {
  std::filesystem::path long_csv;
  std::filesystem::path summary_csv;
};

/// Writes results.csv and summary.csv into out_dir (created if missing).
/// Throws std::runtime_error naming the path on I/O failure.
EmittedFiles emit_results(std::span<const RunResult> results, const std::filesystem::path& out_dir);

/// A parsed row of the long CSV.
struct LongRow {
  std::string config_id;
  std::size_t epoch = 0;
  double sharpe = 0.0;
  double cumulative_return = 0.0;
};

std::vector<LongRow> read_long_csv(const std::filesystem::path& path);

}  // namespace biasq
