#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "biasq/theory.hpp"

namespace biasq::claims {

enum class Status { Pass, Fail, Reported };

std::string_view to_string(Status s);

/// Outcome of one numerical check of the theory. `Reported` marks a
/// comparison whose disagreement is informative rather than a failure.
struct ClaimResult {
  std::string id;
  Status status = Status::Fail;
  double observed = 0.0;
  double target = 0.0;
  std::string detail;
};

/// 3-state, 2-action deterministic MDP with gamma 0.9: action 0 advances
/// s -> s+1 (mod 3), action 1 stays. Rewards mix gains and losses.
theory::SmallMDP oracle_mdp();

/// Q-learning (epsilon 0.3, alpha = 1/(1 + visits/100), 1e5 steps) on oracle_mdp()
/// against value iteration; passes when the sup-norm gap is within 1e-2.
ClaimResult oracle_equivalence(double lambda, std::uint64_t seed);

/// `trials` random Q pairs on each of `n_mdps` random MDPs (mixed deterministic
/// and stochastic); observed is the number of contraction violations.
ClaimResult contraction(std::size_t n_mdps, std::size_t trials, double lambda, std::uint64_t seed);

/// ||T Q* - Q*||_inf below the value-iteration tolerance on random MDPs.
ClaimResult fixed_point(std::uint64_t seed);

/// loss_averse(r, lambda) == r + (lambda-1) min(0, r) for `pairs` dyadic (r, lambda);
/// the detail line also reports the worst relative gap on continuous samples.
ClaimResult value_transform_identity(std::size_t pairs, std::uint64_t seed);

/// bellman_apply(mdp, Q, lambda) equals the unbiased operator on pre-transformed rewards.
ClaimResult bellman_decomposition(std::uint64_t seed);

ClaimResult policy_shift(double lambda_low, double lambda_high);

/// Q*_LA entrywise non-increasing along lambda = 1, 1.25, ..., 3 on random MDPs.
ClaimResult lambda_monotonicity(std::uint64_t seed);

/// sharpe_bound(.., lambda = 1) == mu / sigma exactly.
ClaimResult sharpe_bound_identity(std::uint64_t seed);

/// Exploratory fraction of `selections` fixed-epsilon choices within 3 standard errors of epsilon.
ClaimResult exploration_fixed(double epsilon, std::size_t selections, std::uint64_t seed);

/// Monte-Carlo exploration count under the overconfidence schedule on an
/// i.i.d. N(mu, sd^2) reward stream vs T * eps0 * exp(-beta * E[max(0, mean_k)]),
/// within 10%.
struct AdaptiveExplorationSetup {
  std::size_t steps = 100'000;
  double epsilon0 = 0.1;
  double beta = 1.0;
  std::size_t window = 10;
  double reward_mean = 0.2;
  double reward_sd = 1.0;
};
ClaimResult exploration_adaptive(const AdaptiveExplorationSetup& setup, std::uint64_t seed);

/// Closed-form optimal lambda vs brute-force grid search on uniform [-1, 0]
/// losses with alpha_u = 0.1. Always Reported; detail states agreement within 0.05.
struct OptimalLambdaComparison {
  double closed_form = 0.0;
  double grid_search = 0.0;
  bool agree = false;
};
OptimalLambdaComparison compare_optimal_lambda(std::size_t samples, double risk_aversion, std::uint64_t seed);
ClaimResult optimal_lambda_crosscheck(std::uint64_t seed);

std::vector<ClaimResult> run_all(std::uint64_t seed);

bool all_passed(const std::vector<ClaimResult>& results);

void write_text(const std::vector<ClaimResult>& results, std::ostream& out);

/// claim_id,status,observed,target,detail
void write_csv(const std::vector<ClaimResult>& results, std::ostream& out);

}  // namespace biasq::claims
