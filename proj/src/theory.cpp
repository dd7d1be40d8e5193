#include "biasq/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>

#include <fmt/format.h>

#include "biasq/errors.hpp"
#include "biasq/rewards.hpp"

namespace biasq::theory {

SmallMDP::SmallMDP(std::size_t n_states, std::size_t n_actions, std::vector<double> transition,
                   std::vector<double> reward, double gamma)
    : n_states_(n_states),
      n_actions_(n_actions),
      transition_(std::move(transition)),
      reward_(std::move(reward)),
      gamma_(gamma) {
  if (n_states_ < 1 || n_actions_ < 1) throw InputError("MDP needs at least one state and one action");
  if (transition_.size() != n_states_ * n_actions_ * n_states_) {
    throw InputError(fmt::format("transition table has {} entries, expected {}", transition_.size(),
                                 n_states_ * n_actions_ * n_states_));
  }
  if (reward_.size() != n_states_ * n_actions_) {
    throw InputError(fmt::format("reward table has {} entries, expected {}", reward_.size(), n_states_ * n_actions_));
  }
  if (!(gamma_ >= 0.0 && gamma_ < 1.0)) throw InputError(fmt::format("gamma must be in [0, 1), got {}", gamma_));
  for (double r : reward_) {
    if (!std::isfinite(r)) throw InputError("MDP rewards must be finite");
  }
  for (std::size_t s = 0; s < n_states_; ++s) {
    for (std::size_t a = 0; a < n_actions_; ++a) {
      const auto row = next_distribution(s, a);
      if (std::any_of(row.begin(), row.end(), [](double x) { return !(x >= 0.0); })) {
        throw InputError(fmt::format("negative transition probability at ({}, {})", s, a));
      }
      const double total = std::accumulate(row.begin(), row.end(), 0.0);
      if (std::abs(total - 1.0) > 1e-12) {
        throw InputError(fmt::format("transition row ({}, {}) sums to {}", s, a, total));
      }
    }
  }
}

bool SmallMDP::is_deterministic() const {
  return std::all_of(transition_.begin(), transition_.end(), [](double x) { return x == 0.0 || x == 1.0; });
}

SmallMDP deterministic_mdp(std::size_t n_states, std::size_t n_actions, std::span<const std::size_t> next,
                           std::vector<double> reward, double gamma) {
  if (next.size() != n_states * n_actions) throw InputError("next-state table has the wrong size");
  std::vector<double> p(n_states * n_actions * n_states, 0.0);
  for (std::size_t i = 0; i < next.size(); ++i) {
    if (next[i] >= n_states) throw InputError(fmt::format("next state {} out of range", next[i]));
    p[i * n_states + next[i]] = 1.0;
  }
  return SmallMDP(n_states, n_actions, std::move(p), std::move(reward), gamma);
}

SmallMDP random_mdp(Rng& rng, std::size_t n_states, std::size_t n_actions, double gamma, bool deterministic) {
  std::vector<double> p(n_states * n_actions * n_states, 0.0);
  std::vector<double> r(n_states * n_actions);
  for (std::size_t sa = 0; sa < n_states * n_actions; ++sa) {
    double* row = p.data() + sa * n_states;
    if (deterministic) {
      row[rng.uniform_index(n_states)] = 1.0;
    } else {
      double total = 0.0;
      for (std::size_t j = 0; j < n_states; ++j) total += (row[j] = rng.uniform01() + 1e-3);
      for (std::size_t j = 0; j < n_states; ++j) row[j] /= total;
      // fold the rounding residue into the last entry so the row sums to 1
      const double sum = std::accumulate(row, row + n_states - 1, 0.0);
      row[n_states - 1] = 1.0 - sum;
    }
    r[sa] = 2.0 * rng.uniform01() - 1.0;
  }
  return SmallMDP(n_states, n_actions, std::move(p), std::move(r), gamma);
}

QTable bellman_apply(const SmallMDP& mdp, const QTable& q, double lambda) {
  if (q.n_states() != mdp.n_states() || q.n_actions() != mdp.n_actions()) {
    throw InputError(fmt::format("Q-table is {}x{} but the MDP is {}x{}", q.n_states(), q.n_actions(), mdp.n_states(),
                                 mdp.n_actions()));
  }
  std::vector<double> v(mdp.n_states());
  for (std::size_t s = 0; s < mdp.n_states(); ++s) v[s] = q.max_value(s);

  QTable out(mdp.n_states(), mdp.n_actions());
  for (std::size_t s = 0; s < mdp.n_states(); ++s) {
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
      const auto dist = mdp.next_distribution(s, a);
      double expected = 0.0;
      for (std::size_t j = 0; j < dist.size(); ++j) expected += dist[j] * v[j];
      out(s, a) = loss_averse(mdp.r(s, a), lambda) + mdp.gamma() * expected;
    }
  }
  return out;
}

QTable value_iteration(const SmallMDP& mdp, double lambda, double tol) {
  if (!(tol > 0.0)) throw InputError("value iteration tolerance must be positive");
  QTable q(mdp.n_states(), mdp.n_actions(), 0.0);
  for (;;) {
    QTable next = bellman_apply(mdp, q, lambda);
    const double change = next.sup_distance(q);
    q = std::move(next);
    if (change < tol) return q;
  }
}

ContractionReport check_contraction(const SmallMDP& mdp, double lambda, std::size_t trials, Rng& rng) {
  ContractionReport rep;
  const auto random_q = [&] {
    QTable q(mdp.n_states(), mdp.n_actions());
    for (std::size_t s = 0; s < mdp.n_states(); ++s)
      for (std::size_t a = 0; a < mdp.n_actions(); ++a) q(s, a) = 20.0 * rng.uniform01() - 10.0;
    return q;
  };
  for (std::size_t i = 0; i < trials; ++i) {
    const QTable q1 = random_q();
    const QTable q2 = random_q();
    const double lhs = bellman_apply(mdp, q1, lambda).sup_distance(bellman_apply(mdp, q2, lambda));
    const double dist = q1.sup_distance(q2);
    ++rep.trials;
    if (lhs <= mdp.gamma() * dist + 1e-12) {
      ++rep.passes;
    } else {
      ++rep.failures;
    }
    if (dist > 0.0) rep.worst_ratio = std::max(rep.worst_ratio, lhs / dist);
  }
  return rep;
}

SmallMDP risky_safe_mdp(double gain, double loss, double safe_payoff, double gamma) {
  // 0 start, 1 win, 2 lose, 3 sure payoff, 4 absorbing; action 0 risky, action 1 safe
  constexpr std::size_t kStates = 5;
  constexpr std::size_t kActions = 2;
  std::vector<double> p(kStates * kActions * kStates, 0.0);
  const auto set = [&](std::size_t s, std::size_t a, std::size_t s2, double prob) {
    p[(s * kActions + a) * kStates + s2] = prob;
  };
  set(0, 0, 1, 0.5);
  set(0, 0, 2, 0.5);
  set(0, 1, 3, 1.0);
  for (std::size_t s = 1; s < kStates; ++s)
    for (std::size_t a = 0; a < kActions; ++a) set(s, a, 4, 1.0);

  std::vector<double> r(kStates * kActions, 0.0);
  for (std::size_t a = 0; a < kActions; ++a) {
    r[1 * kActions + a] = gain;
    r[2 * kActions + a] = -loss;
    r[3 * kActions + a] = safe_payoff;
  }
  return SmallMDP(kStates, kActions, std::move(p), std::move(r), gamma);
}

namespace {

constexpr double kArgmaxMargin = 1e-8;

// Greedy action at s when it beats every other action by a clear margin.
std::optional<std::size_t> strict_argmax(const QTable& q, std::size_t s) {
  const std::size_t best = q.argmax(s);
  for (std::size_t a = 0; a < q.n_actions(); ++a) {
    if (a != best && q(s, best) - q(s, a) <= kArgmaxMargin) return std::nullopt;
  }
  return best;
}

std::optional<PolicyShiftWitness> find_shift(const SmallMDP& mdp, double lo, double hi) {
  const QTable q_lo = value_iteration(mdp, lo);
  const QTable q_hi = value_iteration(mdp, hi);
  for (std::size_t s = 0; s < mdp.n_states(); ++s) {
    const auto a_lo = strict_argmax(q_lo, s);
    const auto a_hi = strict_argmax(q_hi, s);
    if (a_lo && a_hi && *a_lo != *a_hi) return PolicyShiftWitness{mdp, s, *a_lo, *a_hi, lo, hi, false};
  }
  return std::nullopt;
}

}  // namespace

PolicyShiftWitness demonstrate_policy_shift(double lambda_low, double lambda_high, std::size_t budget,
                                            std::uint64_t seed) {
  if (!(lambda_low >= 1.0)) throw ConfigError(fmt::format("lambda_low must be >= 1, got {}", lambda_low));
  if (!(lambda_low < lambda_high)) {
    throw ConfigError(fmt::format("need lambda_low < lambda_high, got {} and {}", lambda_low, lambda_high));
  }

  // Risky pays 0.5 in expectation at lambda_low and 0.5 - (hi - lo) at lambda_high.
  constexpr double kLoss = 2.0;
  const double gain = 2.0 * lambda_low + 1.0;
  const double risky_hi = 0.5 * (gain - lambda_high * kLoss);
  double safe = 0.4;
  if (!(risky_hi < safe)) safe = 0.5 * (std::max(0.0, risky_hi) + 0.5);
  if (auto w = find_shift(risky_safe_mdp(gain, kLoss, safe, 0.9), lambda_low, lambda_high)) return *w;

  Rng rng(seed);
  for (std::size_t i = 0; i < budget; ++i) {
    const std::size_t n = 2 + rng.uniform_index(3);
    const SmallMDP mdp = random_mdp(rng, n, 2, 0.9, false);
    const auto rw = mdp.rewards();
    if (std::all_of(rw.begin(), rw.end(), [](double r) { return r >= 0.0; })) continue;
    if (auto w = find_shift(mdp, lambda_low, lambda_high)) {
      w->from_search = true;
      return *w;
    }
  }
  throw std::runtime_error(
      fmt::format("no policy-shift witness for lambda {} -> {} within {} MDPs", lambda_low, lambda_high, budget));
}

double optimal_lambda(std::span<const double> samples, const UtilitySpec& u) {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t n = 0;
  for (double r : samples) {
    if (r < 0.0) {
      sum += r;
      sum_sq += r * r;
      ++n;
    }
  }
  if (n == 0) throw InputError("optimal lambda needs at least one negative sample");
  const double m1 = sum / static_cast<double>(n);
  const double m2 = sum_sq / static_cast<double>(n);
  return 1.0 + 2.0 * u.risk_aversion * m1 / m2;
}

double expected_biased_utility(std::span<const double> samples, double lambda, const UtilitySpec& u) {
  if (samples.empty()) throw InputError("expected utility of an empty sample");
  double total = 0.0;
  for (double r : samples) total += (r < 0.0 ? lambda * r : r) - u.risk_aversion * r * r;
  return total / static_cast<double>(samples.size());
}

double optimal_lambda_grid(std::span<const double> samples, const UtilitySpec& u, double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw InputError("invalid lambda grid");
  const auto count = static_cast<std::size_t>(std::llround((hi - lo) / step));
  double best_lambda = lo;
  double best = expected_biased_utility(samples, lo, u);
  for (std::size_t i = 1; i <= count; ++i) {
    const double lambda = lo + static_cast<double>(i) * step;
    const double value = expected_biased_utility(samples, lambda, u);
    if (value > best) {
      best = value;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

double sharpe_bound(double mu, double sigma, double p_neg, double sigma_neg, double lambda) {
  if (!(sigma > 0.0)) throw InputError(fmt::format("sharpe bound needs sigma > 0, got {}", sigma));
  if (!(p_neg >= 0.0 && p_neg <= 1.0)) throw InputError(fmt::format("p_neg must be in [0, 1], got {}", p_neg));
  if (!(sigma_neg >= 0.0)) throw InputError(fmt::format("sigma_neg must be >= 0, got {}", sigma_neg));
  const double k = (lambda - 1.0) * p_neg;
  return (mu / sigma) * (1.0 + k) / (1.0 + k * sigma_neg / sigma);
}

QTable q_learning(const SmallMDP& mdp, double lambda, const QLearningRun& run, Rng& rng) {
  if (run.start_state >= mdp.n_states()) throw InputError("start state out of range");
  QTable q(mdp.n_states(), mdp.n_actions(), 0.0);
  std::vector<std::size_t> visits(mdp.n_states() * mdp.n_actions(), 0);

  std::size_t s = run.start_state;
  for (std::size_t t = 0; t < run.steps; ++t) {
    const std::size_t a = select_column(q, s, run.epsilon, rng).column;

    const auto dist = mdp.next_distribution(s, a);
    const double u = rng.uniform01();
    std::size_t s_next = dist.size() - 1;
    double acc = 0.0;
    for (std::size_t j = 0; j < dist.size(); ++j) {
      acc += dist[j];
      if (u < acc) {
        s_next = j;
        break;
      }
    }

    std::size_t& n = visits[s * mdp.n_actions() + a];
    const double alpha = 1.0 / (1.0 + static_cast<double>(n) / run.visit_scale);
    td_update(q, s, a, loss_averse(mdp.r(s, a), lambda), s_next, alpha, mdp.gamma());
    ++n;
    s = s_next;
  }
  return q;
}

}  // namespace biasq::theory
