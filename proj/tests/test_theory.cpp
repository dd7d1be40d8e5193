#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "biasq/errors.hpp"
#include "biasq/rewards.hpp"
#include "biasq/theory.hpp"

using namespace biasq;
using namespace biasq::theory;

namespace {

SmallMDP self_loop(double r, double gamma) {
  const std::vector<std::size_t> next{0, 0};
  return deterministic_mdp(1, 2, next, {r, r}, gamma);
}

}  // namespace

TEST(SmallMDP, RejectsInvalidTables) {
  EXPECT_THROW(SmallMDP(2, 1, {0.5, 0.4, 0.0, 1.0}, {0, 0}, 0.9), InputError);
  EXPECT_THROW(SmallMDP(2, 1, {1.5, -0.5, 0.0, 1.0}, {0, 0}, 0.9), InputError);
  EXPECT_THROW(SmallMDP(2, 1, {1.0, 0.0, 0.0, 1.0}, {0, NAN}, 0.9), InputError);
  EXPECT_THROW(SmallMDP(2, 1, {1.0, 0.0, 0.0, 1.0}, {0, 0}, 1.0), InputError);
  EXPECT_THROW(SmallMDP(2, 1, {1.0, 0.0}, {0, 0}, 0.5), InputError);
  EXPECT_NO_THROW(SmallMDP(2, 1, {0.25, 0.75, 0.0, 1.0}, {0, 0}, 0.0));
}

TEST(RandomMDP, RowsAreDistributions) {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const bool det = i % 2 == 0;
    const SmallMDP m = random_mdp(rng, 4, 3, 0.9, det);
    EXPECT_EQ(m.is_deterministic(), det || m.is_deterministic());
    for (double r : m.rewards()) {
      EXPECT_GE(r, -1.0);
      EXPECT_LE(r, 1.0);
    }
  }
}

TEST(Bellman, ZeroDiscountReturnsBiasedReward) {
  Rng rng(5);
  const SmallMDP m = random_mdp(rng, 3, 2, 0.0, false);
  QTable q(3, 2);
  for (std::size_t s = 0; s < 3; ++s) q(s, 0) = 100.0 * (s + 1.0);
  const QTable t = bellman_apply(m, q, 2.5);
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t a = 0; a < 2; ++a) EXPECT_EQ(t(s, a), loss_averse(m.r(s, a), 2.5));
}

TEST(Bellman, SelfLoopHandValues) {
  const SmallMDP m = self_loop(-1.0, 0.5);
  EXPECT_EQ(bellman_apply(m, QTable(1, 2), 2.0)(0, 0), -2.0);
  EXPECT_NEAR(value_iteration(m, 2.0)(0, 0), -4.0, 1e-9);
  EXPECT_NEAR(value_iteration(self_loop(1.0, 0.9), 1.0)(0, 1), 10.0, 1e-8);
}

TEST(Bellman, MatchesHandRolledOperatorOnStochasticMdp) {
  // two states, two actions; explicit sums
  const SmallMDP m(2, 2, {0.3, 0.7, 1.0, 0.0, 0.5, 0.5, 0.0, 1.0}, {-1.0, 0.5, 2.0, -0.25}, 0.8);
  QTable q(2, 2);
  q(0, 0) = 1.0, q(0, 1) = 3.0, q(1, 0) = -2.0, q(1, 1) = 0.5;
  const double v0 = 3.0, v1 = 0.5;
  const QTable t = bellman_apply(m, q, 2.0);
  EXPECT_DOUBLE_EQ(t(0, 0), -2.0 + 0.8 * (0.3 * v0 + 0.7 * v1));
  EXPECT_DOUBLE_EQ(t(0, 1), 0.5 + 0.8 * v0);
  EXPECT_DOUBLE_EQ(t(1, 0), 2.0 + 0.8 * (0.5 * v0 + 0.5 * v1));
  EXPECT_DOUBLE_EQ(t(1, 1), -0.5 + 0.8 * v1);
}

TEST(ValueIteration, NoLossesMeansLambdaIsIrrelevant) {
  const std::vector<std::size_t> next{1, 0, 1, 1};
  const SmallMDP m = deterministic_mdp(2, 2, next, {0.5, 1.0, 0.0, 2.0}, 0.9);
  EXPECT_EQ(value_iteration(m, 2.0), value_iteration(m, 1.0));
}

TEST(ValueIteration, IsAFixedPoint) {
  Rng rng(6);
  for (int i = 0; i < 20; ++i) {
    const SmallMDP m = random_mdp(rng, 4, 3, 0.95, i % 2 == 0);
    const QTable q = value_iteration(m, 2.0);
    EXPECT_LT(bellman_apply(m, q, 2.0).sup_distance(q), 1e-9);
  }
}

TEST(ValueIteration, BiasedOperatorEqualsPlainOperatorOnTransformedRewards) {
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    const SmallMDP m = random_mdp(rng, 3, 2, 0.9, false);
    const SmallMDP shifted = m.map_rewards([](double r) { return r + 1.5 * std::min(0.0, r); });
    EXPECT_LT(value_iteration(m, 2.5).sup_distance(value_iteration(shifted, 1.0)), 1e-9);
  }
}

TEST(Contraction, HoldsAcrossRandomMdpsAndLambdas) {
  Rng rng(11);
  for (int i = 0; i < 40; ++i) {
    const double gamma = 0.99 * rng.uniform01();
    const SmallMDP m = random_mdp(rng, 2 + rng.uniform_index(4), 2 + rng.uniform_index(2), gamma, i % 2 == 0);
    const double lambda = 1.0 + 2.0 * rng.uniform01();
    const ContractionReport rep = check_contraction(m, lambda, 50, rng);
    EXPECT_EQ(rep.trials, 50u);
    EXPECT_EQ(rep.failures, 0u);
    EXPECT_EQ(rep.passes, 50u);
    EXPECT_LE(rep.worst_ratio, gamma + 1e-9);
  }
}

TEST(PolicyShift, WitnessIsIndependentlyConfirmed) {
  const PolicyShiftWitness w = demonstrate_policy_shift(1.0, 2.0);
  EXPECT_NE(w.action_low, w.action_high);
  const QTable lo = value_iteration(w.mdp, w.lambda_low);
  const QTable hi = value_iteration(w.mdp, w.lambda_high);
  EXPECT_EQ(lo.argmax(w.state), w.action_low);
  EXPECT_EQ(hi.argmax(w.state), w.action_high);
  EXPECT_GT(lo(w.state, w.action_low), lo(w.state, w.action_high));
  EXPECT_GT(hi(w.state, w.action_high), hi(w.state, w.action_low));
}

TEST(PolicyShift, CloseLambdasStillSeparate) {
  const PolicyShiftWitness w = demonstrate_policy_shift(1.5, 1.6);
  EXPECT_NE(value_iteration(w.mdp, 1.5).argmax(w.state), value_iteration(w.mdp, 1.6).argmax(w.state));
}

TEST(PolicyShift, RejectsBadLambdas) {
  EXPECT_THROW(demonstrate_policy_shift(2.0, 2.0), ConfigError);
  EXPECT_THROW(demonstrate_policy_shift(2.0, 1.5), ConfigError);
  EXPECT_THROW(demonstrate_policy_shift(0.5, 1.5), ConfigError);
}

TEST(RiskySafe, RiskyPreferredOnlyWhenLossesAreCheap) {
  const SmallMDP m = risky_safe_mdp(3.0, 2.0, 0.4, 0.9);
  // risky: 0.5 * 3 - 0.5 * 2 lambda, discounted once; safe: 0.4 discounted once
  EXPECT_EQ(value_iteration(m, 1.0).argmax(0), 0u);
  EXPECT_EQ(value_iteration(m, 2.0).argmax(0), 1u);
}

TEST(OptimalLambda, ClosedFormHandValues) {
  const std::vector<double> point(10, -0.5);
  EXPECT_NEAR(optimal_lambda(point, {0.1}), 1.0 - 2.0 * 0.1 / 0.5, 1e-15);

  std::vector<double> grid;
  const int n = 100'000;
  for (int i = 0; i < n; ++i) grid.push_back(-(i + 0.5) / n);
  grid.push_back(3.0);
  EXPECT_NEAR(optimal_lambda(grid, {0.1}), 0.7, 1e-6);

  EXPECT_THROW(optimal_lambda(std::vector<double>{0.0, 1.0}, {0.1}), InputError);
}

TEST(OptimalLambda, UtilityAndGrid) {
  const std::vector<double> s{-1.0, 2.0};
  EXPECT_DOUBLE_EQ(expected_biased_utility(s, 2.0, {0.1}), 0.5 * ((-2.0 - 0.1) + (2.0 - 0.4)));
  // utility is decreasing in lambda whenever losses exist, so the grid picks its lower edge
  EXPECT_DOUBLE_EQ(optimal_lambda_grid(s, {0.1}), 0.5);
  EXPECT_DOUBLE_EQ(optimal_lambda_grid(std::vector<double>{1.0, 2.0}, {0.1}), 0.5);
}

TEST(SharpeBound, HandValuesAndIdentities) {
  EXPECT_NEAR(sharpe_bound(1.0, 1.0, 0.5, 2.0, 3.0), 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(sharpe_bound(0.3, 1.5, 0.4, 2.0, 1.0), 0.2);
  EXPECT_DOUBLE_EQ(sharpe_bound(0.3, 1.5, 0.4, 1.5, 2.7), 0.2);
  EXPECT_DOUBLE_EQ(sharpe_bound(0.3, 1.5, 0.0, 4.0, 2.7), 0.2);
  EXPECT_THROW(sharpe_bound(1.0, 0.0, 0.5, 1.0, 2.0), InputError);
  EXPECT_THROW(sharpe_bound(1.0, 1.0, 1.5, 1.0, 2.0), InputError);
}

TEST(QLearning, ConvergesToValueIterationOnSmallMdp) {
  const std::vector<std::size_t> next{1, 0, 0, 1};
  const SmallMDP m = deterministic_mdp(2, 2, next, {-1.0, 0.5, 1.0, -0.5}, 0.5);
  Rng rng(1);
  QLearningRun run;
  run.steps = 50'000;
  const QTable learned = q_learning(m, 2.0, run, rng);
  EXPECT_LT(learned.sup_distance(value_iteration(m, 2.0)), 1e-2);
}
