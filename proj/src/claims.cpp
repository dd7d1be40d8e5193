#include "biasq/claims.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "biasq/agent.hpp"
#include "biasq/rewards.hpp"

namespace biasq::claims {

using theory::SmallMDP;

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    case Status::Reported: return "REPORTED";
  }
  return "?";
}

namespace {

Status pass_if(bool ok) { return ok ? Status::Pass : Status::Fail; }

// Dyadic samples keep every product and sum in the identity exactly representable.
double dyadic_reward(Rng& rng) { return static_cast<double>(static_cast<std::int64_t>(rng.uniform_index(4097)) - 2048) / 1024.0; }
double dyadic_lambda(Rng& rng) { return 1.0 + static_cast<double>(rng.uniform_index(513)) / 256.0; }

SmallMDP random_small_mdp(Rng& rng, bool deterministic, double gamma) {
  const std::size_t n = 2 + rng.uniform_index(3);
  const std::size_t m = 2 + rng.uniform_index(2);
  return theory::random_mdp(rng, n, m, gamma, deterministic);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace

SmallMDP oracle_mdp() {
  const std::array<std::size_t, 6> next{1, 0, 2, 1, 0, 2};
  return theory::deterministic_mdp(3, 2, next, {1.0, -0.5, -1.0, 0.2, 2.0, -0.3}, 0.9);
}

ClaimResult oracle_equivalence(double lambda, std::uint64_t seed) {
  const SmallMDP mdp = oracle_mdp();
  const QTable q_star = theory::value_iteration(mdp, lambda);
  Rng rng(derive_seed(seed, "oracle_equivalence"));
  const QTable q = theory::q_learning(mdp, lambda, theory::QLearningRun{}, rng);
  const double gap = q.sup_distance(q_star);
  return {fmt::format("oracle_equivalence[lambda={}]", lambda), pass_if(gap <= 1e-2), gap, 1e-2,
          "sup-norm gap between Q-learning (1e5 steps) and value iteration"};
}

ClaimResult contraction(std::size_t n_mdps, std::size_t trials, double lambda, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "contraction"));
  std::size_t violations = 0;
  std::size_t total = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < n_mdps; ++i) {
    const double gamma = 0.99 * rng.uniform01();
    const SmallMDP mdp = random_small_mdp(rng, i % 2 == 0, gamma);
    const auto rep = theory::check_contraction(mdp, lambda, trials, rng);
    violations += rep.failures;
    total += rep.trials;
    if (mdp.gamma() > 0.0) worst = std::max(worst, rep.worst_ratio / mdp.gamma());
  }
  return {"contraction", pass_if(violations == 0), static_cast<double>(violations), 0.0,
          fmt::format("{} trials on {} MDPs, lambda={}, worst ratio/gamma={:.6f}", total, n_mdps, lambda, worst)};
}

ClaimResult fixed_point(std::uint64_t seed) {
  Rng rng(derive_seed(seed, "fixed_point"));
  double worst = 0.0;
  for (std::size_t i = 0; i < 20; ++i) {
    const double gamma = i % 4 == 0 ? 0.99 : 0.9 * rng.uniform01();
    const SmallMDP mdp = random_small_mdp(rng, i % 2 == 0, gamma);
    const QTable q = theory::value_iteration(mdp, 2.0);
    worst = std::max(worst, theory::bellman_apply(mdp, q, 2.0).sup_distance(q));
  }
  return {"fixed_point", pass_if(worst < theory::kValueIterationTolerance), worst, theory::kValueIterationTolerance,
          "max ||T Q* - Q*|| over 20 random MDPs, lambda=2"};
}

ClaimResult value_transform_identity(std::size_t pairs, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "value_transform"));
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const double r = dyadic_reward(rng);
    const double lambda = dyadic_lambda(rng);
    if (loss_averse(r, lambda) != r + (lambda - 1.0) * std::min(0.0, r)) ++mismatches;
  }
  double worst_rel = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const double r = 20.0 * rng.uniform01() - 10.0;
    const double lambda = 1.0 + 4.0 * rng.uniform01();
    const double a = loss_averse(r, lambda);
    const double b = r + (lambda - 1.0) * std::min(0.0, r);
    if (a != 0.0) worst_rel = std::max(worst_rel, std::abs(a - b) / std::abs(a));
  }
  return {"value_transform_identity", pass_if(mismatches == 0), static_cast<double>(mismatches), 0.0,
          fmt::format("{} exact dyadic pairs; continuous samples max relative gap {:.3g}", pairs, worst_rel)};
}

ClaimResult bellman_decomposition(std::uint64_t seed) {
  Rng rng(derive_seed(seed, "bellman_decomposition"));
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    const SmallMDP raw = random_small_mdp(rng, i % 2 == 0, 0.9);
    const SmallMDP mdp = raw.map_rewards([&](double) { return dyadic_reward(rng); });
    const double lambda = dyadic_lambda(rng);
    QTable q(mdp.n_states(), mdp.n_actions());
    for (std::size_t s = 0; s < mdp.n_states(); ++s)
      for (std::size_t a = 0; a < mdp.n_actions(); ++a) q(s, a) = 20.0 * rng.uniform01() - 10.0;

    const SmallMDP shifted = mdp.map_rewards([&](double r) { return r + (lambda - 1.0) * std::min(0.0, r); });
    if (!(theory::bellman_apply(mdp, q, lambda) == theory::bellman_apply(shifted, q, 1.0))) ++mismatches;
  }
  return {"bellman_decomposition", pass_if(mismatches == 0), static_cast<double>(mismatches), 0.0,
          "T_LA Q vs unbiased T on r + (lambda-1) min(0, r), 200 random cases"};
}

ClaimResult policy_shift(double lambda_low, double lambda_high) {
  const auto w = theory::demonstrate_policy_shift(lambda_low, lambda_high);
  const QTable lo = theory::value_iteration(w.mdp, lambda_low);
  const QTable hi = theory::value_iteration(w.mdp, lambda_high);
  const bool ok = lo.argmax(w.state) == w.action_low && hi.argmax(w.state) == w.action_high &&
                  w.action_low != w.action_high;
  const double margin = std::min(lo(w.state, w.action_low) - lo(w.state, w.action_high),
                                 hi(w.state, w.action_high) - hi(w.state, w.action_low));
  return {fmt::format("policy_shift[{}->{}]", lambda_low, lambda_high), pass_if(ok && margin > 0.0), margin, 0.0,
          fmt::format("state {} action {} -> {} ({})", w.state, w.action_low, w.action_high,
                      w.from_search ? "random search" : "risky/safe construction")};
}

ClaimResult lambda_monotonicity(std::uint64_t seed) {
  Rng rng(derive_seed(seed, "lambda_monotonicity"));
  double worst_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 20; ++i) {
    const SmallMDP mdp = random_small_mdp(rng, i % 2 == 0, 0.9);
    QTable prev = theory::value_iteration(mdp, 1.0);
    for (double lambda = 1.25; lambda <= 3.0; lambda += 0.25) {
      const QTable cur = theory::value_iteration(mdp, lambda);
      const auto pv = prev.values();
      const auto cv = cur.values();
      for (std::size_t k = 0; k < pv.size(); ++k) worst_increase = std::max(worst_increase, cv[k] - pv[k]);
      prev = cur;
    }
  }
  // value iteration stops within 1e-10 of the fixed point, so allow that much slack
  constexpr double kSlack = 1e-9;
  return {"lambda_monotonicity", pass_if(worst_increase <= kSlack), worst_increase, kSlack,
          "largest entrywise increase of Q*_LA along lambda = 1..3 step 0.25"};
}

ClaimResult sharpe_bound_identity(std::uint64_t seed) {
  Rng rng(derive_seed(seed, "sharpe_bound"));
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < 10'000; ++i) {
    const double mu = 4.0 * rng.uniform01() - 2.0;
    const double sigma = 0.01 + 3.0 * rng.uniform01();
    const double p_neg = rng.uniform01();
    const double sigma_neg = 3.0 * rng.uniform01();
    if (theory::sharpe_bound(mu, sigma, p_neg, sigma_neg, 1.0) != mu / sigma) ++mismatches;
    if (theory::sharpe_bound(mu, sigma, 0.0, sigma_neg, 1.0 + 4.0 * rng.uniform01()) != mu / sigma) ++mismatches;
  }
  return {"sharpe_bound_identity", pass_if(mismatches == 0), static_cast<double>(mismatches), 0.0,
          "bound equals mu/sigma at lambda=1 and at p_neg=0"};
}

ClaimResult exploration_fixed(double epsilon, std::size_t selections, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "exploration_fixed"));
  const QTable q(1, 3, 0.0);
  std::size_t explored = 0;
  for (std::size_t i = 0; i < selections; ++i) explored += select_column(q, 0, epsilon, rng).explored ? 1 : 0;
  const double n = static_cast<double>(selections);
  const double frac = static_cast<double>(explored) / n;
  const double se = std::sqrt(epsilon * (1.0 - epsilon) / n);
  return {"exploration_fixed", pass_if(std::abs(frac - epsilon) <= 3.0 * se), frac, epsilon,
          fmt::format("{} selections, |frac - eps| = {:.3g}, 3 SE = {:.3g}", selections, std::abs(frac - epsilon),
                      3.0 * se)};
}

ClaimResult exploration_adaptive(const AdaptiveExplorationSetup& setup, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "exploration_adaptive"));
  const ExplorationSchedule sched = OverconfidentEpsilon{setup.epsilon0, setup.beta, setup.window};
  const QTable q(1, 3, 0.0);

  std::vector<double> window;
  std::size_t explored = 0;
  for (std::size_t t = 0; t < setup.steps; ++t) {
    const double eps = epsilon_at(sched, window);
    explored += select_column(q, 0, eps, rng).explored ? 1 : 0;
    if (window.size() == setup.window) window.erase(window.begin());
    window.push_back(setup.reward_mean + setup.reward_sd * rng.normal());
  }

  // mean of k i.i.d. N(mu, sd^2) is N(mu, sd^2/k); E[max(0, X)] = mu Phi(mu/s) + s phi(mu/s)
  const double s = setup.reward_sd / std::sqrt(static_cast<double>(setup.window));
  const double z = setup.reward_mean / s;
  const double e_pos = setup.reward_mean * normal_cdf(z) + s * normal_pdf(z);
  const double predicted = static_cast<double>(setup.steps) * setup.epsilon0 * std::exp(-setup.beta * e_pos);
  const double rel = std::abs(static_cast<double>(explored) - predicted) / predicted;
  return {"exploration_adaptive", pass_if(rel <= 0.10), static_cast<double>(explored), predicted,
          fmt::format("relative gap {:.4f} (tolerance 0.10), E[max(0, mean_k)] = {:.4f}", rel, e_pos)};
}

OptimalLambdaComparison compare_optimal_lambda(std::size_t samples, double risk_aversion, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "optimal_lambda"));
  std::vector<double> xs(samples);
  for (double& x : xs) x = rng.uniform01() - 1.0;  // [-1, 0)
  const theory::UtilitySpec u{risk_aversion};
  OptimalLambdaComparison c;
  c.closed_form = theory::optimal_lambda(xs, u);
  c.grid_search = theory::optimal_lambda_grid(xs, u, 0.5, 3.0, 0.01);
  c.agree = std::abs(c.closed_form - c.grid_search) <= 0.05;
  return c;
}

ClaimResult optimal_lambda_crosscheck(std::uint64_t seed) {
  const auto c = compare_optimal_lambda(100'000, 0.1, seed);
  return {"optimal_lambda_crosscheck", Status::Reported, c.closed_form, c.grid_search,
          fmt::format("closed form {:.4f} vs grid search {:.2f}: {}", c.closed_form, c.grid_search,
                      c.agree ? "agree within 0.05" : "disagree beyond 0.05")};
}

std::vector<ClaimResult> run_all(std::uint64_t seed) {
  return {
      oracle_equivalence(1.0, seed),
      oracle_equivalence(2.0, seed),
      contraction(20, 1000, 2.0, seed),
      fixed_point(seed),
      value_transform_identity(100'000, seed),
      bellman_decomposition(seed),
      policy_shift(1.0, 3.0),
      lambda_monotonicity(seed),
      sharpe_bound_identity(seed),
      exploration_fixed(0.1, 100'000, seed),
      exploration_adaptive({}, seed),
      optimal_lambda_crosscheck(seed),
  };
}

bool all_passed(const std::vector<ClaimResult>& results) {
  return std::none_of(results.begin(), results.end(), [](const ClaimResult& r) { return r.status == Status::Fail; });
}

void write_text(const std::vector<ClaimResult>& results, std::ostream& out) {
  for (const auto& r : results) {
    fmt::print(out, "[{:<8}] {:<34} observed={:<12.6g} target={:<12.6g} {}\n", to_string(r.status), r.id, r.observed,
               r.target, r.detail);
  }
}

void write_csv(const std::vector<ClaimResult>& results, std::ostream& out) {
  out << "claim_id,status,observed,target,detail\n";
  for (const auto& r : results) {
    std::string detail;
    for (char c : r.detail) {
      if (c == '"') detail += '"';
      detail += c;
    }
    fmt::print(out, "{},{},{},{},\"{}\"\n", r.id, to_string(r.status), r.observed, r.target, detail);
  }
}

}  // namespace biasq::claims
