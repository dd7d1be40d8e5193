#include <gtest/gtest.h>

#include <cmath>

#include "biasq/errors.hpp"
#include "biasq/rewards.hpp"
#include "biasq/rng.hpp"

using namespace biasq;

namespace {
RewardContext ctx(double v_prev, double v_next, double v0 = 1000.0) { return {v_prev, v_next, v0, {}, 0.0}; }
}  // namespace

TEST(BaseReward, IsValueChange) {
  EXPECT_EQ(base_reward(ctx(100, 103)), 3.0);
  EXPECT_EQ(base_reward(ctx(100, 100)), 0.0);
  EXPECT_EQ(base_reward(ctx(120, 95)), -25.0);
}

TEST(LossAverse, AmplifiesLossesOnly) {
  EXPECT_EQ(loss_averse(-1.0, 2.0), -2.0);
  EXPECT_EQ(loss_averse(5.0, 3.0), 5.0);
  EXPECT_EQ(loss_averse(-2.5, 1.0), -2.5);
  EXPECT_EQ(loss_averse(0.0, 3.0), 0.0);
  EXPECT_THROW(loss_averse(1.0, 0.99), ConfigError);
}

TEST(LossAverse, Properties) {
  Rng rng(8);
  for (int i = 0; i < 20'000; ++i) {
    const double r = 20.0 * rng.uniform01() - 10.0;
    const double q = r + 5.0 * rng.uniform01();
    const double l1 = 1.0 + 3.0 * rng.uniform01();
    const double l2 = l1 + 2.0 * rng.uniform01();
    ASSERT_EQ(loss_averse(r, 1.0), r);
    ASSERT_LE(loss_averse(r, l1), loss_averse(q, l1));
    if (r < 0) ASSERT_GE(loss_averse(r, l1), loss_averse(r, l2));
    // decomposition r + (lambda - 1) min(0, r); exact for dyadic inputs, within rounding otherwise
    ASSERT_NEAR(loss_averse(r, l1), r + (l1 - 1.0) * std::min(0.0, r), 1e-14 * std::abs(r) * l1);
  }
}

TEST(ProportionalReward, NormalizesByInitialValue) {
  EXPECT_DOUBLE_EQ(proportional_reward(ctx(1000, 1010, 1000)), 0.01);
  EXPECT_EQ(proportional_reward(ctx(1000, 1000, 1000)), 0.0);
  EXPECT_DOUBLE_EQ(proportional_reward(ctx(500, 490, 1000)), -0.01);
  EXPECT_THROW(proportional_reward(ctx(1, 2, 0.0)), InputError);
}

TEST(VolatilityPenalized, WindowStdPenalty) {
  EXPECT_EQ(volatility_penalized_reward(ctx(0, 3), 0.5, 10), 3.0);

  const std::vector<double> w{1.0, -1.0};
  RewardContext c = ctx(0, 3);
  c.recent_rewards = w;
  EXPECT_DOUBLE_EQ(volatility_penalized_reward(c, 0.5, 10), 2.5);

  const std::vector<double> flat{2.0, 2.0, 2.0};
  c = ctx(0, 0);
  c.recent_rewards = flat;
  EXPECT_EQ(volatility_penalized_reward(c, 1.0, 10), 0.0);

  const std::vector<double> one{4.0};
  c = ctx(0, 1);
  c.recent_rewards = one;
  EXPECT_EQ(volatility_penalized_reward(c, 1.0, 10), 1.0);
}

TEST(VolatilityPenalized, UsesOnlyLastWindowEntries) {
  const std::vector<double> w{100.0, -100.0, 1.0, 1.0};
  RewardContext c = ctx(0, 3);
  c.recent_rewards = w;
  EXPECT_EQ(volatility_penalized_reward(c, 1.0, 2), 3.0);
}

TEST(PositiveScaled, ScalesGainsOnly) {
  EXPECT_EQ(positive_scaled_reward(2.0, 1.5), 3.0);
  EXPECT_EQ(positive_scaled_reward(-2.0, 1.5), -2.0);
  EXPECT_EQ(positive_scaled_reward(0.0, 1.5), 0.0);
  EXPECT_EQ(positive_scaled_reward(7.25, 1.0), 7.25);
}

TEST(Smoothed, ExponentialMovingAverage) {
  EXPECT_EQ(smoothed_reward(4.0, 0.0, 0.5), 2.0);
  EXPECT_EQ(smoothed_reward(4.0, 2.0, 1.0), 4.0);
  EXPECT_EQ(smoothed_reward(0.0, 0.0, 0.3), 0.0);
}

TEST(RewardSpec, ValidationRejectsBadParameters) {
  EXPECT_NO_THROW(validate(RewardSpec::smoothed(0.5, RewardSpec::positive_scaled(1.5, RewardSpec::loss_averse(2.0)))));
  EXPECT_THROW(validate(RewardSpec::loss_averse(0.5)), ConfigError);
  EXPECT_THROW(validate(RewardSpec::positive_scaled(0.0)), ConfigError);
  EXPECT_THROW(validate(RewardSpec::smoothed(0.0)), ConfigError);
  EXPECT_THROW(validate(RewardSpec::smoothed(1.5)), ConfigError);
  EXPECT_THROW(validate(RewardSpec::volatility_penalized(-1.0, 10)), ConfigError);
  EXPECT_THROW(validate(RewardSpec::volatility_penalized(0.5, 0)), ConfigError);
  EXPECT_THROW(validate(RewardSpec::positive_scaled(1.5, RewardSpec::smoothed(0.5))), ConfigError);
}

TEST(RewardSpec, LabelsAndLossAversionInsertion) {
  EXPECT_EQ(label(RewardSpec::base()), "base");
  EXPECT_EQ(label(with_loss_aversion(RewardSpec::base(), 1.0)), "base");
  EXPECT_EQ(label(with_loss_aversion(RewardSpec::base(), 2.0)), "loss_averse(base)");
  EXPECT_EQ(label(with_loss_aversion(RewardSpec::smoothed(0.5, RewardSpec::positive_scaled(1.5)), 2.0)),
            "smoothed(positive_scaled(loss_averse(base)))");
  EXPECT_EQ(label(with_loss_aversion(RewardSpec::volatility_penalized(), 3.0)), "loss_averse(volatility_penalized)");
  EXPECT_THROW(with_loss_aversion(RewardSpec::loss_averse(2.0), 2.0), ConfigError);
  EXPECT_EQ(label(with_loss_aversion(RewardSpec::loss_averse(2.0), 1.0)), "loss_averse(base)");
}

TEST(RewardSpec, EvaluateComposesBiasBeforeShaping) {
  const RewardSpec spec = RewardSpec::positive_scaled(1.5, RewardSpec::loss_averse(2.0));
  EXPECT_EQ(evaluate(spec, ctx(10, 12)), 3.0);
  EXPECT_EQ(evaluate(spec, ctx(10, 8)), -4.0);
}

TEST(RewardTracker, SmoothingCarriesAcrossStepsAndResets) {
  RewardTracker t(RewardSpec::smoothed(0.5));
  t.reset(100.0);
  EXPECT_EQ(t.step(100, 104), 2.0);  // 0.5*4 + 0.5*0
  EXPECT_EQ(t.step(104, 104), 1.0);  // 0.5*0 + 0.5*2
  t.reset(100.0);
  EXPECT_EQ(t.step(100, 104), 2.0);
}

TEST(RewardTracker, VolatilityWindowIsBounded) {
  RewardTracker t(RewardSpec::volatility_penalized(1.0, 2));
  t.reset(0.0);
  EXPECT_EQ(t.step(0, 1), 1.0);     // empty window
  EXPECT_EQ(t.step(1, 0), -1.0);    // one entry: no penalty
  EXPECT_EQ(t.step(0, 0), -1.0);    // window {1, -1}: std 1
  EXPECT_EQ(t.step(0, 0), -0.5);    // window {-1, 0}: std 0.5
}

TEST(RewardTracker, ProportionalUsesEpochStartValue) {
  RewardTracker t(RewardSpec::proportional());
  t.reset(500.0);
  EXPECT_EQ(t.step(600, 650), 0.1);
}
