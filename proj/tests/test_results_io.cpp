#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "biasq/results_io.hpp"

using namespace biasq;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("biasq_results_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST(ResultsIo, LongCsvHasOneRowPerEpoch) {
  ExperimentConfig base;
  GridSpec g{base, 0, {{"state_space", {n_states_axis({5, 10, 15, 20})}}}};
  const auto results = run_grid(g);
  const auto dir = scratch("long");
  const EmittedFiles files = emit_results(results, dir);
  const auto rows = read_long_csv(files.long_csv);
  ASSERT_EQ(rows.size(), 200u);
  EXPECT_EQ(rows.front().config_id, "state_space:n_states=5");
  EXPECT_EQ(rows[49].epoch, 49u);
  EXPECT_EQ(rows[50].config_id, "state_space:n_states=10");
  for (const auto& r : rows) {
    EXPECT_TRUE(std::isfinite(r.sharpe));
    EXPECT_TRUE(std::isfinite(r.cumulative_return));
  }
  const std::string text = slurp(files.long_csv);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "config_id,n_states,lambda,gamma,action_set,q_init,initial_holdings,reward,epoch,sharpe,cumulative_return,"
            "seed");

  const std::string first = slurp(files.long_csv);
  const std::string first_summary = slurp(files.summary_csv);
  emit_results(results, dir);
  EXPECT_EQ(slurp(files.long_csv), first);
  EXPECT_EQ(slurp(files.summary_csv), first_summary);
  std::filesystem::remove_all(dir);
}

TEST(ResultsIo, EmptyResultsWriteHeadersOnly) {
  std::ostringstream out;
  write_long_csv({}, out);
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
  std::ostringstream sum;
  write_summary_csv({}, sum);
  const std::string summary = sum.str();
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 1);
}

TEST(ResultsIo, TailSummaryUsesLastEpochs) {
  RunResult r{"x", {}, {}, QTable(2, 2), 0.0};
  for (std::size_t e = 0; e < 12; ++e) r.epochs.push_back({e, static_cast<double>(e), 1.0});
  const TailSummary t = tail_summary(r);
  EXPECT_EQ(t.epochs, 10u);
  EXPECT_DOUBLE_EQ(t.sharpe_mean, 6.5);
  EXPECT_DOUBLE_EQ(t.sharpe_std, std::sqrt(8.25));
  EXPECT_EQ(t.return_mean, 1.0);
  EXPECT_EQ(t.return_std, 0.0);
  EXPECT_EQ(tail_summary(r, 50).epochs, 12u);
}
