#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "biasq/market_env.hpp"
#include "biasq/rng.hpp"

namespace biasq {

/// Dense n_states x n_actions action-value table, row-major.
class QTable {
 public:
  QTable(std::size_t n_states, std::size_t n_actions, double fill = 0.0);

  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return n_actions_; }

  double& operator()(std::size_t s, std::size_t a) { return values_[s * n_actions_ + a]; }
  double operator()(std::size_t s, std::size_t a) const { return values_[s * n_actions_ + a]; }

  std::span<const double> row(std::size_t s) const { return {values_.data() + s * n_actions_, n_actions_}; }
  std::span<const double> values() const { return values_; }

  /// Greedy column for state s; ties go to the lowest column index.
  std::size_t argmax(std::size_t s) const;
  double max_value(std::size_t s) const;

  /// Largest absolute entrywise difference. Throws InputError on a shape mismatch.
  double sup_distance(const QTable& other) const;

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::size_t n_states_;
  std::size_t n_actions_;
  std::vector<double> values_;
};

/// CSV with a "state" column followed by one column per action.
void write_csv(const QTable& q, const ActionSet& actions, std::ostream& out);

// ---------------------------------------------------------------------------

struct ZerosInit {};
struct UniformRandomInit {
  std::uint64_t seed = 0;
};
struct SmallPositiveInit {
  double value = 0.1;
};
using InitStrategy = std::variant<ZerosInit, UniformRandomInit, SmallPositiveInit>;

/// UniformRandom draws row-major from Rng(seed).uniform01().
QTable init_qtable(const InitStrategy& strategy, std::size_t n_states, std::size_t n_actions);

// ---------------------------------------------------------------------------

struct FixedEpsilon {
  double epsilon = 0.1;
};

/// epsilon0 * exp(-beta * max(0, mean of the last `window` rewards)).
struct OverconfidentEpsilon {
  double epsilon0 = 0.1;
  double beta = 1.0;
  std::size_t window = 10;
};

using ExplorationSchedule = std::variant<FixedEpsilon, OverconfidentEpsilon>;

void validate(const ExplorationSchedule& sched);

/// Rewards window length the schedule reads (0 for a fixed rate).
std::size_t reward_window(const ExplorationSchedule& sched);

/// An empty window counts as a mean of 0. Only the last `window` entries are used.
double epsilon_at(const ExplorationSchedule& sched, std::span<const double> recent_rewards);

// ---------------------------------------------------------------------------

struct LearnerParams {
  double alpha = 0.1;  ///< learning rate, (0, 1]
  double gamma = 0.9;  ///< discount, [0, 1)

  void validate() const;
};

struct Selection {
  std::size_t column = 0;
  bool explored = false;
};

/// Epsilon-greedy over the columns of q at state s. Always consumes one uniform
/// for the explore test and, when exploring, one more for the uniform column.
/// Exploration may pick the greedy column.
Selection select_column(const QTable& q, std::size_t s, double epsilon, Rng& rng);

/// select_column mapped through the action set; q must have actions.size() columns.
Action select_action(const QTable& q, std::size_t s, double epsilon, const ActionSet& actions, Rng& rng);

/// Q(s,a) += alpha * (r + gamma * max_a' Q(s_next, a') - Q(s,a)). Returns the new entry.
/// No range check on alpha/gamma; throws NumericError for a non-finite reward.
double td_update(QTable& q, std::size_t s, std::size_t a, double r, std::size_t s_next, double alpha, double gamma);

inline double q_update(QTable& q, std::size_t s, std::size_t a, double r, std::size_t s_next,
                       const LearnerParams& params) {
  return td_update(q, s, a, r, s_next, params.alpha, params.gamma);
}

}  // namespace biasq
