#include "biasq/results_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "biasq/errors.hpp"

namespace biasq {

namespace {

constexpr std::string_view kAxisColumns = "config_id,n_states,lambda,gamma,action_set,q_init,initial_holdings,reward";

void write_axis_fields(const RunResult& r, std::ostream& out) {
  const auto& c = r.config;
  fmt::print(out, "{},{},{},{},{},{},{},{}", r.config_id, c.n_states, c.lambda, c.gamma, to_string(c.action_set),
             label(c.q_init), c.initial_holdings, label(c.reward));
}

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / static_cast<double>(xs.size()))};
}

std::ofstream open_for_write(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", p.string()));
  return out;
}

}  // namespace

TailSummary tail_summary(const RunResult& run, std::size_t last) {
  const std::size_t n = std::min(last, run.epochs.size());
  std::vector<double> sharpe;
  std::vector<double> ret;
  for (std::size_t i = run.epochs.size() - n; i < run.epochs.size(); ++i) {
    sharpe.push_back(run.epochs[i].sharpe);
    ret.push_back(run.epochs[i].cumulative_return);
  }
  const auto [sm, ss] = mean_std(sharpe);
  const auto [rm, rs] = mean_std(ret);
  return {n, sm, ss, rm, rs};
}

void write_long_csv(std::span<const RunResult> results, std::ostream& out) {
  out << kAxisColumns << ",epoch,sharpe,cumulative_return,seed\n";
  for (const RunResult& r : results) {
    for (const EpochMetrics& m : r.epochs) {
      write_axis_fields(r, out);
      fmt::print(out, ",{},{},{},{}\n", m.epoch_index, m.sharpe, m.cumulative_return, r.config.run_seed);
    }
  }
}

void write_summary_csv(std::span<const RunResult> results, std::ostream& out) {
  out << kAxisColumns << ",seed,tail_epochs,sharpe_mean,sharpe_std,return_mean,return_std\n";
  for (const RunResult& r : results) {
    const TailSummary t = tail_summary(r);
    write_axis_fields(r, out);
    fmt::print(out, ",{},{},{},{},{},{}\n", r.config.run_seed, t.epochs, t.sharpe_mean, t.sharpe_std, t.return_mean,
               t.return_std);
  }
}

EmittedFiles emit_results(std::span<const RunResult> results, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error(fmt::format("cannot create '{}': {}", out_dir.string(), ec.message()));

  EmittedFiles files{out_dir / "results.csv", out_dir / "summary.csv"};
  {
    auto out = open_for_write(files.long_csv);
    write_long_csv(results, out);
    if (!out) throw std::runtime_error(fmt::format("write failed for '{}'", files.long_csv.string()));
  }
  {
    auto out = open_for_write(files.summary_csv);
    write_summary_csv(results, out);
    if (!out) throw std::runtime_error(fmt::format("write failed for '{}'", files.summary_csv.string()));
  }
  return files;
}

std::vector<LongRow> read_long_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));

  std::string line;
  if (!std::getline(in, line)) throw InputError(fmt::format("'{}' is empty", path.string()));
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    for (std::string col; std::getline(ss, col, ',');) header.push_back(col);
  }
  const auto col = [&](std::string_view name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InputError(fmt::format("'{}' has no '{}' column", path.string(), name));
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_id = col("config_id");
  const std::size_t c_epoch = col("epoch");
  const std::size_t c_sharpe = col("sharpe");
  const std::size_t c_ret = col("cumulative_return");

  std::vector<LongRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    if (f.size() != header.size()) {
      throw InputError(fmt::format("'{}' line {}: expected {} fields, got {}", path.string(), line_no, header.size(), f.size()));
    }
    try {
      rows.push_back({f[c_id], std::stoul(f[c_epoch]), std::stod(f[c_sharpe]), std::stod(f[c_ret])});
    } catch (const std::logic_error&) {
      throw InputError(fmt::format("'{}' line {}: malformed number", path.string(), line_no));
    }
  }
  return rows;
}

}  // namespace biasq
