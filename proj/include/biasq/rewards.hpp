#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace biasq {

/// Inputs available to a reward transform at one step.
struct RewardContext {
  double v_prev = 0.0;  ///< portfolio value before the step
  double v_next = 0.0;  ///< portfolio value after the step
  double v0 = 0.0;      ///< portfolio value at the start of the epoch
  std::span<const double> recent_rewards;  ///< prior base rewards, oldest first
  double prev_reward = 0.0;                ///< last reward emitted to the learner
};

double base_reward(const RewardContext& ctx);

/// r for r >= 0, lambda * r otherwise. Throws ConfigError for lambda < 1.
double loss_averse(double r, double lambda);

/// (v_next - v_prev) / v0. Throws InputError when v0 == 0.
double proportional_reward(const RewardContext& ctx);

/// base - c * population_stddev(last `window` entries of recent_rewards).
/// The penalty is zero while fewer than two entries are available.
double volatility_penalized_reward(const RewardContext& ctx, double penalty, std::size_t window);

/// kappa * r for r > 0, r otherwise.
double positive_scaled_reward(double r, double kappa);

/// Exponential moving average s * r + (1 - s) * prev.
double smoothed_reward(double r, double prev, double s);

double population_stddev(std::span<const double> xs);

// ---------------------------------------------------------------------------
// Composable reward specification
// ---------------------------------------------------------------------------

struct RewardSpec;
using RewardSpecPtr = std::shared_ptr<const RewardSpec>;

struct BaseReward {};
struct ProportionalReward {};
struct VolatilityPenalizedReward {
  double penalty = 0.5;
  std::size_t window = 10;
};
/// A null `inner` stands for BaseReward.
struct LossAverseReward {
  double lambda = 1.0;
  RewardSpecPtr inner;
};
struct PositiveScaledReward {
  double kappa = 1.5;
  RewardSpecPtr inner;
};
/// Only valid at the root of a spec: its state is the reward last emitted to the learner.
struct SmoothedReward {
  double s = 0.5;
  RewardSpecPtr inner;
};

struct RewardSpec {
  using Node = std::variant<BaseReward, ProportionalReward, VolatilityPenalizedReward, LossAverseReward,
                            PositiveScaledReward, SmoothedReward>;
  Node node = BaseReward{};

  static RewardSpec base() { return {BaseReward{}}; }
  static RewardSpec proportional() { return {ProportionalReward{}}; }
  static RewardSpec volatility_penalized(double penalty = 0.5, std::size_t window = 10) {
    return {VolatilityPenalizedReward{penalty, window}};
  }
  static RewardSpec loss_averse(double lambda, RewardSpec inner = base());
  static RewardSpec positive_scaled(double kappa = 1.5, RewardSpec inner = base());
  static RewardSpec smoothed(double s = 0.5, RewardSpec inner = base());
};

/// Throws ConfigError when any parameter is out of range or a SmoothedReward is nested.
void validate(const RewardSpec& spec);

double evaluate(const RewardSpec& spec, const RewardContext& ctx);

/// Compact, comma-free label such as "smoothed(loss_averse(base))".
std::string label(const RewardSpec& spec);

/// Largest volatility window used anywhere in the spec (0 when none).
std::size_t history_window(const RewardSpec& spec);

/// Wraps the innermost economic signal (base, proportional or volatility-penalized)
/// in a LossAverseReward, keeping shaping stages outside it. lambda == 1 returns
/// the spec unchanged. Throws ConfigError if the spec already carries a
/// loss-aversion stage and lambda != 1.
RewardSpec with_loss_aversion(const RewardSpec& spec, double lambda);

bool contains_loss_aversion(const RewardSpec& spec);

/// Per-epoch bookkeeping for a RewardSpec: keeps the bounded window of prior
/// base rewards and the last emitted reward, and builds the RewardContext.
class RewardTracker {
 public:
  explicit RewardTracker(RewardSpec spec);

  /// Starts an epoch: empties the window, sets prev to 0 and records v0.
  void reset(double v0);

  /// Reward for a step from v_prev to v_next; updates internal state.
  double step(double v_prev, double v_next);

  const RewardSpec& spec() const { return spec_; }

 private:
  RewardSpec spec_;
  std::size_t window_;
  std::vector<double> history_;
  double v0_ = 0.0;
  double prev_ = 0.0;
};

}  // namespace biasq
