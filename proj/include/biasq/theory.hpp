#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "biasq/agent.hpp"
#include "biasq/rng.hpp"

namespace biasq::theory {

/// Finite MDP with explicit transition and reward tables.
/// Invariants (checked on construction): every (s, a) transition row sums to 1
/// within 1e-12 with non-negative entries, rewards are finite, gamma in [0, 1).
class SmallMDP {
 public:
  /// transition is indexed [(s * n_actions + a) * n_states + s'], reward [s * n_actions + a].
  SmallMDP(std::size_t n_states, std::size_t n_actions, std::vector<double> transition, std::vector<double> reward,
           double gamma);

  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return n_actions_; }
  double gamma() const { return gamma_; }

  double p(std::size_t s, std::size_t a, std::size_t s_next) const {
    return transition_[(s * n_actions_ + a) * n_states_ + s_next];
  }
  std::span<const double> next_distribution(std::size_t s, std::size_t a) const {
    return {transition_.data() + (s * n_actions_ + a) * n_states_, n_states_};
  }
  double r(std::size_t s, std::size_t a) const { return reward_[s * n_actions_ + a]; }
  std::span<const double> rewards() const { return reward_; }

  /// Same dynamics with every reward passed through f.
  template <class F>
  SmallMDP map_rewards(F&& f) const {
    std::vector<double> out(reward_.size());
    for (std::size_t i = 0; i < reward_.size(); ++i) out[i] = f(reward_[i]);
    return SmallMDP(n_states_, n_actions_, transition_, std::move(out), gamma_);
  }

  bool is_deterministic() const;

 private:
  std::size_t n_states_;
  std::size_t n_actions_;
  std::vector<double> transition_;
  std::vector<double> reward_;
  double gamma_;
};

/// Deterministic MDP from a next-state table next[s * n_actions + a].
SmallMDP deterministic_mdp(std::size_t n_states, std::size_t n_actions, std::span<const std::size_t> next,
                           std::vector<double> reward, double gamma);

/// Random MDP with rewards uniform on [-1, 1]. Transition rows are normalized
/// uniform weights, or a single uniformly chosen successor when deterministic.
SmallMDP random_mdp(Rng& rng, std::size_t n_states, std::size_t n_actions, double gamma, bool deterministic);

/// Loss-averse Bellman optimality operator:
/// (T Q)(s,a) = r_LA(s,a) + gamma * sum_s' P(s'|s,a) max_a' Q(s',a').
QTable bellman_apply(const SmallMDP& mdp, const QTable& q, double lambda);

inline constexpr double kValueIterationTolerance = 1e-10;

/// Iterates bellman_apply from Q = 0 until the sup-norm change drops below tol.
QTable value_iteration(const SmallMDP& mdp, double lambda, double tol = kValueIterationTolerance);

struct ContractionReport {
  std::size_t trials = 0;
  std::size_t passes = 0;
  std::size_t failures = 0;
  double worst_ratio = 0.0;  ///< max ||TQ1 - TQ2|| / ||Q1 - Q2|| over trials with Q1 != Q2
};

/// Draws Q pairs with entries uniform on [-10, 10] and checks
/// ||T Q1 - T Q2||_inf <= gamma ||Q1 - Q2||_inf + 1e-12.
ContractionReport check_contraction(const SmallMDP& mdp, double lambda, std::size_t trials, Rng& rng);

struct PolicyShiftWitness {
  SmallMDP mdp;
  std::size_t state = 0;
  std::size_t action_low = 0;
  std::size_t action_high = 0;
  double lambda_low = 1.0;
  double lambda_high = 1.0;
  bool from_search = false;  ///< false when the hand-built risky/safe family produced it
};

inline constexpr std::size_t kPolicyShiftSearchBudget = 10'000;

/// Finds an MDP and state whose greedy action under Q*_LA changes between
/// lambda_low and lambda_high. The risky-versus-safe construction is tried
/// first, then up to `budget` random 2-4 state MDPs. Throws ConfigError unless
/// 1 <= lambda_low < lambda_high, and std::runtime_error if nothing is found.
PolicyShiftWitness demonstrate_policy_shift(double lambda_low, double lambda_high,
                                            std::size_t budget = kPolicyShiftSearchBudget,
                                            std::uint64_t seed = 0);

/// The risky/safe family: from state 0, "risky" reaches +gain or -loss with
/// equal probability, "safe" reaches a sure payoff; outcomes pay on the next
/// step and then absorb in a zero-reward state.
SmallMDP risky_safe_mdp(double gain, double loss, double safe_payoff, double gamma);

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

struct UtilitySpec {
  double risk_aversion = 0.1;  ///< curvature alpha_u > 0 of U(x) = x - alpha_u x^2
};

/// 1 + 2 alpha_u E[r | r < 0] / E[r^2 | r < 0], conditional moments taken as
/// plain means over the negative samples. Throws InputError without negative samples.
double optimal_lambda(std::span<const double> samples, const UtilitySpec& u);

/// Sample mean of U_lambda(r): r - alpha_u r^2 for r >= 0, lambda r - alpha_u r^2 for r < 0.
double expected_biased_utility(std::span<const double> samples, double lambda, const UtilitySpec& u);

/// Brute-force maximizer of expected_biased_utility on lo, lo+step, ..., hi.
/// Ties go to the smallest lambda.
double optimal_lambda_grid(std::span<const double> samples, const UtilitySpec& u, double lo = 0.5, double hi = 3.0,
                           double step = 0.01);

/// Approximate Sharpe bound
/// (mu/sigma) * (1 + (lambda-1) p_neg) / (1 + (lambda-1) p_neg sigma_neg / sigma).
/// Throws InputError when sigma == 0 or the probability is outside [0, 1].
double sharpe_bound(double mu, double sigma, double p_neg, double sigma_neg, double lambda);

// ---------------------------------------------------------------------------
// Q-learning against an explicit MDP
// ---------------------------------------------------------------------------

struct QLearningRun {
  std::size_t steps = 100'000;
  double epsilon = 0.3;
  /// alpha for the n-th visit of (s, a) is 1 / (1 + n / visit_scale), n counted before the update.
  double visit_scale = 100.0;
  std::size_t start_state = 0;
};

/// Single continuing trajectory of epsilon-greedy tabular Q-learning on the
/// loss-averse rewards of `mdp`, using the agent module's selection and update.
QTable q_learning(const SmallMDP& mdp, double lambda, const QLearningRun& run, Rng& rng);

}  // namespace biasq::theory
