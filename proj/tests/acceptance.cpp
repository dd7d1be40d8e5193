// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// usage: biasq_acceptance <path-to-biasq-cli> <scratch-dir>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "biasq/claims.hpp"
#include "biasq/harness.hpp"
#include "biasq/results_io.hpp"
#include "biasq/theory.hpp"

namespace fs = std::filesystem;
using namespace biasq;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& cli, const std::string& args) {
  const std::string cmd = fmt::format("\"{}\" {} > /dev/null 2>&1", cli, args);
  return std::system(cmd.c_str());
}

Outcome ac1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  bool ok = true;
  for (double lambda : {1.0, 2.0}) {
    const claims::ClaimResult r = claims::oracle_equivalence(lambda, 0);
    ok = ok && r.status == claims::Status::Pass;
    worst = std::max(worst, r.observed);
  }
  const double secs = seconds_since(t0);
  return {ok && secs < 5.0, fmt::format("max sup-norm gap {:.3g} (limit 1e-2), {:.2f}s", worst, secs)};
}

Outcome ac2() {
  const auto t0 = std::chrono::steady_clock::now();
  const claims::ClaimResult r = claims::contraction(20, 1000, 2.0, 0);
  const double secs = seconds_since(t0);
  return {r.status == claims::Status::Pass && secs < 5.0,
          fmt::format("{} violations in 20000 trials, {:.2f}s", r.observed, secs)};
}

Outcome ac3() {
  const claims::ClaimResult r = claims::value_transform_identity(100'000, 0);
  return {r.status == claims::Status::Pass, r.detail};
}

Outcome ac4() {
  const auto t0 = std::chrono::steady_clock::now();
  const theory::PolicyShiftWitness w = theory::demonstrate_policy_shift(1.0, 3.0);
  const QTable lo = theory::value_iteration(w.mdp, 1.0);
  const QTable hi = theory::value_iteration(w.mdp, 3.0);
  const bool verified = lo.argmax(w.state) == w.action_low && hi.argmax(w.state) == w.action_high &&
                        w.action_low != w.action_high;
  const double secs = seconds_since(t0);
  return {verified && secs < 10.0,
          fmt::format("state {} greedy action {} -> {}, {:.2f}s", w.state, w.action_low, w.action_high, secs)};
}

Outcome ac5() {
  const claims::ClaimResult fixed = claims::exploration_fixed(0.1, 100'000, 0);
  const claims::ClaimResult adaptive = claims::exploration_adaptive({}, 0);
  return {fixed.status == claims::Status::Pass && adaptive.status == claims::Status::Pass,
          fmt::format("fixed fraction {:.4f}; adaptive {:.0f} vs {:.0f}", fixed.observed, adaptive.observed,
                      adaptive.target)};
}

// Mean last-10-epoch cumulative return per config id.
std::map<std::string, double> tail_returns(const GridSpec& g) {
  std::map<std::string, double> out;
  for (const RunResult& r : run_grid(g)) out[r.config_id] = tail_summary(r).return_mean;
  return out;
}

Outcome ac6() {
  int good_seeds = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GridSpec g{ExperimentConfig{}, seed, {{"state_space", {n_states_axis({5, 10, 15, 20})}}}};
    int non_positive = 0;
    for (const auto& [id, ret] : tail_returns(g)) non_positive += ret <= 0.0 ? 1 : 0;
    good_seeds += non_positive >= 3 ? 1 : 0;
    detail += fmt::format("{}{}/4", seed == 1 ? "" : " ", non_positive);
  }
  return {good_seeds >= 4, fmt::format("seeds with >=3 of 4 n non-positive: {}/5 ({})", good_seeds, detail)};
}

Outcome ac7() {
  int good_seeds = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ExperimentConfig base;
    base.run_seed = derive_seed(seed, "portfolio");
    ExperimentConfig ten = base;
    ten.initial_holdings = 10;
    const double r0 = tail_summary(run_experiment(base)).return_mean;
    const double r10 = tail_summary(run_experiment(ten)).return_mean;
    good_seeds += r10 > r0 ? 1 : 0;
    detail += fmt::format("{}{:.2f}/{:.2f}", seed == 1 ? "" : " ", r10, r0);
  }
  return {good_seeds >= 4, fmt::format("seeds with pi0=10 above pi0=0: {}/5 (pi0=10/pi0=0: {})", good_seeds, detail)};
}

Outcome ac8(const std::string& cli, const fs::path& work) {
  const fs::path a = work / "det_a", b = work / "det_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const std::string cfg = fmt::format("--config \"{}/configs/ablation_grid.json\"", BIASQ_SOURCE_DIR);
  if (run_cli(cli, fmt::format("grid {} --out \"{}\"", cfg, a.string())) != 0 ||
      run_cli(cli, fmt::format("grid {} --out \"{}\" --parallel 4", cfg, b.string())) != 0)
    return {false, "grid invocation failed"};
  bool same = true;
  for (const char* f : {"results.csv", "summary.csv"}) {
    const std::string x = slurp(a / f), y = slurp(b / f);
    same = same && !x.empty() && x == y;
  }
  return {same, same ? "results.csv and summary.csv byte-identical" : "outputs differ"};
}

Outcome ac9() {
  const auto c = claims::compare_optimal_lambda(100'000, 0.1, 0);
  return {true, fmt::format("reported: closed form {:.4f}, grid search {:.2f}, {} (tolerance 0.05)", c.closed_form,
                            c.grid_search, c.agree ? "agree" : "disagree")};
}

Outcome ac10(const std::string& cli, const fs::path& work) {
  const fs::path out = work / "full_grid";
  fs::remove_all(out);
  const auto t0 = std::chrono::steady_clock::now();
  const int rc = run_cli(cli, fmt::format("grid --out \"{}\"", out.string()));
  const double secs = seconds_since(t0);
  if (rc != 0) return {false, "grid invocation failed"};
  const auto rows = read_long_csv(out / "results.csv");
  return {rows.size() == 25 * 50 && secs < 300.0, fmt::format("{} rows in {:.2f}s", rows.size(), secs)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: biasq_acceptance <biasq-cli> <scratch-dir>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path work = argv[2];
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
      {"AC1 oracle equivalence", ac1},
      {"AC2 contraction", ac2},
      {"AC3 value-transform identity", ac3},
      {"AC4 policy-shift witness", ac4},
      {"AC5 exploration schedule", ac5},
      {"AC6 negative returns across n", ac6},
      {"AC7 initial holdings", ac7},
      {"AC8 determinism", [&] { return ac8(cli, work); }},
      {"AC9 optimal lambda cross-check", ac9},
      {"AC10 full grid runtime", [&] { return ac10(cli, work); }},
  };

  int failures = 0;
  for (const auto& [name, check] : checks) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : fmt::format("{} criteria failed", failures)) << std::endl;
  return failures == 0 ? 0 : 1;
}
