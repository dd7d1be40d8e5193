#include "biasq/agent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "biasq/errors.hpp"

namespace biasq {

QTable::QTable(std::size_t n_states, std::size_t n_actions, double fill)
    : n_states_(n_states), n_actions_(n_actions), values_(n_states * n_actions, fill) {
  if (n_states < 1) throw ConfigError("Q-table needs at least one state");
  if (n_actions < 1) throw ConfigError("Q-table needs at least one action");
}

std::size_t QTable::argmax(std::size_t s) const {
  const auto r = row(s);
  return static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
}

double QTable::max_value(std::size_t s) const {
  const auto r = row(s);
  return *std::max_element(r.begin(), r.end());
}

double QTable::sup_distance(const QTable& other) const {
  if (other.n_states_ != n_states_ || other.n_actions_ != n_actions_) {
    throw InputError(fmt::format("Q-table shape mismatch: {}x{} vs {}x{}", n_states_, n_actions_, other.n_states_,
                                 other.n_actions_));
  }
  double d = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) d = std::max(d, std::abs(values_[i] - other.values_[i]));
  return d;
}

void write_csv(const QTable& q, const ActionSet& actions, std::ostream& out) {
  out << "state";
  for (std::size_t a = 0; a < q.n_actions(); ++a) {
    out << ',' << (a < actions.size() ? to_string(actions[a]) : std::string_view("a?"));
  }
  out << '\n';
  for (std::size_t s = 0; s < q.n_states(); ++s) {
    out << s;
    for (double v : q.row(s)) fmt::print(out, ",{}", v);
    out << '\n';
  }
}

QTable init_qtable(const InitStrategy& strategy, std::size_t n_states, std::size_t n_actions) {
  if (n_states < 1) throw ConfigError(fmt::format("n_states must be >= 1, got {}", n_states));
  if (n_actions < 2) throw ConfigError(fmt::format("n_actions must be >= 2, got {}", n_actions));

  if (std::holds_alternative<SmallPositiveInit>(strategy)) {
    return QTable(n_states, n_actions, std::get<SmallPositiveInit>(strategy).value);
  }
  QTable q(n_states, n_actions, 0.0);
  if (const auto* u = std::get_if<UniformRandomInit>(&strategy)) {
    Rng rng(u->seed);
    for (std::size_t s = 0; s < n_states; ++s)
      for (std::size_t a = 0; a < n_actions; ++a) q(s, a) = rng.uniform01();
  }
  return q;
}

void validate(const ExplorationSchedule& sched) {
  if (const auto* f = std::get_if<FixedEpsilon>(&sched)) {
    if (!(f->epsilon >= 0.0 && f->epsilon <= 1.0)) throw ConfigError(fmt::format("epsilon must be in [0, 1], got {}", f->epsilon));
    return;
  }
  const auto& o = std::get<OverconfidentEpsilon>(sched);
  if (!(o.epsilon0 >= 0.0 && o.epsilon0 <= 1.0)) throw ConfigError(fmt::format("epsilon0 must be in [0, 1], got {}", o.epsilon0));
  if (!(o.beta >= 0.0)) throw ConfigError(fmt::format("beta must be >= 0, got {}", o.beta));
  if (o.window < 1) throw ConfigError("overconfidence window must be >= 1");
}

std::size_t reward_window(const ExplorationSchedule& sched) {
  if (const auto* o = std::get_if<OverconfidentEpsilon>(&sched)) return o->window;
  return 0;
}

double epsilon_at(const ExplorationSchedule& sched, std::span<const double> recent_rewards) {
  if (const auto* f = std::get_if<FixedEpsilon>(&sched)) return f->epsilon;
  const auto& o = std::get<OverconfidentEpsilon>(sched);
  if (recent_rewards.size() > o.window) recent_rewards = recent_rewards.last(o.window);
  double mean = 0.0;
  if (!recent_rewards.empty()) {
    mean = std::accumulate(recent_rewards.begin(), recent_rewards.end(), 0.0) /
           static_cast<double>(recent_rewards.size());
  }
  return o.epsilon0 * std::exp(-o.beta * std::max(0.0, mean));
}

void LearnerParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError(fmt::format("alpha must be in (0, 1], got {}", alpha));
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError(fmt::format("gamma must be in [0, 1), got {}", gamma));
}

Selection select_column(const QTable& q, std::size_t s, double epsilon, Rng& rng) {
  if (rng.uniform01() < epsilon) return {rng.uniform_index(q.n_actions()), true};
  return {q.argmax(s), false};
}

Action select_action(const QTable& q, std::size_t s, double epsilon, const ActionSet& actions, Rng& rng) {
  if (q.n_actions() != actions.size()) {
    throw InputError(fmt::format("Q-table has {} columns but the action set has {}", q.n_actions(), actions.size()));
  }
  return actions[select_column(q, s, epsilon, rng).column];
}

double td_update(QTable& q, std::size_t s, std::size_t a, double r, std::size_t s_next, double alpha, double gamma) {
  if (!std::isfinite(r)) throw NumericError(fmt::format("non-finite reward {} in Q update", r));
  const double target = r + gamma * q.max_value(s_next);
  double& entry = q(s, a);
  entry += alpha * (target - entry);
  return entry;
}

}  // namespace biasq
