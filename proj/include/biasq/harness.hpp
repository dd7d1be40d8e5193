#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "biasq/agent.hpp"
#include "biasq/market_env.hpp"
#include "biasq/metrics.hpp"
#include "biasq/rewards.hpp"
#include "biasq/rng.hpp"

namespace biasq {

/// One cell of an experiment. Defaults are the rational baseline agent on a
/// 200-step random walk from 100 with unit noise.
struct ExperimentConfig {
  std::size_t n_states = 10;
  double lambda = 1.0;
  double gamma = 0.9;
  double alpha = 0.1;
  ExplorationSchedule exploration = FixedEpsilon{0.1};
  /// Economic signal plus shaping; `lambda` is inserted around the signal.
  RewardSpec reward = RewardSpec::base();
  ActionSet::Kind action_set = ActionSet::Kind::Full;
  /// For UniformRandomInit the seed is mixed with run_seed.
  InitStrategy q_init = ZerosInit{};
  double initial_cash = 1000.0;
  std::int64_t initial_holdings = 0;
  std::size_t steps = 200;
  double p0 = 100.0;
  double sigma = 1.0;
  std::size_t epochs = 50;
  std::uint64_t data_seed = 42;
  std::uint64_t run_seed = 0;

  /// Draw a fresh price path (and refit the discretizer) for every epoch.
  bool resample_per_epoch = false;
  /// Feed base rewards instead of learner rewards into the overconfidence window.
  bool overconfidence_on_base_reward = false;
  /// Compute epoch metrics from learner rewards instead of base portfolio changes.
  bool metrics_on_learner_reward = false;

  void validate() const;
  LearnerParams learner() const { return {alpha, gamma}; }
  ActionSet actions() const {
    return action_set == ActionSet::Kind::Full ? ActionSet::full() : ActionSet::reduced();
  }
  /// reward with lambda applied, i.e. what the learner actually receives.
  RewardSpec effective_reward() const { return with_loss_aversion(reward, lambda); }
};

std::string label(const InitStrategy& init);

struct MarketData {
  PriceSeries series;
  Discretizer discretizer;
  std::vector<std::size_t> states;  ///< discretized series
};

MarketData prepare_market(const ExperimentConfig& cfg, std::uint64_t data_seed);

/// Price path used for an epoch: data_seed itself, or a per-epoch child seed when resampling.
std::uint64_t epoch_data_seed(const ExperimentConfig& cfg, std::size_t epoch);

struct AgentState {
  QTable q;
  Rng rng;
  ActionSet actions;
};

/// Q-table from cfg.q_init and an action-selection stream derived from cfg.run_seed.
AgentState make_agent(const ExperimentConfig& cfg);

struct EpochTrace {
  std::vector<double> base_rewards;     ///< v(t+1) - v(t), one per step
  std::vector<double> learner_rewards;  ///< reward fed to the Q update
  std::vector<Action> actions;
  std::size_t explored = 0;
  Portfolio final_portfolio;
};

/// One pass over the series. The portfolio starts at (initial_cash,
/// initial_holdings); the Q-table in `agent` carries over between calls.
/// At step t the trade executes at p[t] and the reward is realized at p[t+1].
EpochTrace run_epoch(const MarketData& market, AgentState& agent, const ExperimentConfig& cfg);

struct RunResult {
  std::string config_id;
  ExperimentConfig config;
  std::vector<EpochMetrics> epochs;
  QTable q;
  double wall_seconds = 0.0;
};

RunResult run_experiment(const ExperimentConfig& cfg, std::string config_id = "single");

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

struct AxisValue {
  std::string label;
  std::function<void(ExperimentConfig&)> apply;
};

struct Axis {
  std::string name;
  std::vector<AxisValue> values;
};

/// Cartesian product of its axes, everything else at the grid's base config.
struct Sweep {
  std::string name;
  std::vector<Axis> axes;
};

/// A grid is the concatenation of its sweeps.
struct GridSpec {
  ExperimentConfig base;
  std::uint64_t master_seed = 0;
  std::vector<Sweep> sweeps;
};

struct GridCell {
  std::string config_id;  ///< "<sweep>:<axis>=<label>[,<axis>=<label>...]"
  std::string sweep;
  ExperimentConfig config;
};

/// Cells in sweep order, then row-major over each sweep's axes (last axis fastest).
/// Each cell's run_seed is derive_seed(master_seed, config_id).
/// Throws ConfigError when the grid has no cells.
std::vector<GridCell> expand_grid(const GridSpec& grid);

/// Runs every cell on up to `parallelism` threads. Output order matches expand_grid.
std::vector<RunResult> run_grid(const GridSpec& grid, std::size_t parallelism = 1);

/// Single-axis sweep helpers for the standard ablations.
Axis n_states_axis(std::vector<std::size_t> values);
Axis lambda_axis(std::vector<double> values);
Axis gamma_axis(std::vector<double> values);
Axis action_set_axis(std::vector<ActionSet::Kind> values);
Axis q_init_axis(std::vector<InitStrategy> values);
Axis initial_holdings_axis(std::vector<std::int64_t> values);
Axis reward_axis(std::vector<RewardSpec> values);

/// The full ablation study: state-space size, loss aversion, discount, action
/// set, Q-table init, initial holdings and reward variants (25 cells).
GridSpec ablation_grid(ExperimentConfig base = {}, std::uint64_t master_seed = 0);

}  // namespace biasq
