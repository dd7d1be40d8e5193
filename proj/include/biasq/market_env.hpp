#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace biasq {

// ---------------------------------------------------------------------------
// Synthetic price path
// ---------------------------------------------------------------------------

/// Gaussian random walk p[t+1] = p[t] + sigma * z[t], z ~ N(0, 1) from Rng::normal().
struct PriceSeries {
  std::vector<double> prices;
  double p0 = 0.0;
  double sigma = 0.0;
  std::uint64_t seed = 0;

  std::size_t size() const { return prices.size(); }
  double operator[](std::size_t t) const { return prices[t]; }
};

/// Throws ConfigError when steps < 2 or sigma < 0. The walk is not clamped at zero.
PriceSeries generate_prices(std::uint64_t seed, std::size_t steps, double p0, double sigma);

/// Two-column CSV "t,price".
void write_csv(const PriceSeries& series, std::ostream& out);

// ---------------------------------------------------------------------------
// Equal-width state discretization
// ---------------------------------------------------------------------------

/// Maps a price to one of n states using n-1 equal-width thresholds
/// b_i = p_min + i/(n-1) * (p_max - p_min), i = 1..n-1.
///
/// The state of p is the number of thresholds b_i with p >= b_i, so prices
/// below b_1 land in state 0 and prices at or above p_max land in state n-1.
/// A flat series (p_max == p_min) has no thresholds and maps everything to 0.
class Discretizer {
 public:
  Discretizer(std::vector<double> boundaries, std::size_t n_states);

  static Discretizer fit(std::span<const double> prices, std::size_t n_states);

  std::size_t state_of(double price) const;
  std::size_t n_states() const { return n_states_; }
  const std::vector<double>& boundaries() const { return boundaries_; }

 private:
  std::vector<double> boundaries_;
  std::size_t n_states_;
};

Discretizer fit_discretizer(const PriceSeries& series, std::size_t n_states);
inline std::size_t discretize(const Discretizer& d, double price) { return d.state_of(price); }

// ---------------------------------------------------------------------------
// Actions and portfolio accounting
// ---------------------------------------------------------------------------

enum class Action : std::uint8_t { Buy = 0, Sell = 1, Hold = 2 };

std::string_view to_string(Action a);

/// Ordered set of selectable actions. Q-table columns follow this order.
class ActionSet {
 public:
  enum class Kind { Full, Reduced };

  static ActionSet full() { return ActionSet(Kind::Full); }
  /// {Buy, Sell}; never contains Hold.
  static ActionSet reduced() { return ActionSet(Kind::Reduced); }

  Kind kind() const { return kind_; }
  std::size_t size() const { return kind_ == Kind::Full ? 3 : 2; }
  Action operator[](std::size_t i) const { return kAll[i]; }
  bool contains(Action a) const;
  std::span<const Action> actions() const { return {kAll.data(), size()}; }

  friend bool operator==(const ActionSet&, const ActionSet&) = default;

 private:
  explicit ActionSet(Kind k) : kind_(k) {}
  static constexpr std::array<Action, 3> kAll{Action::Buy, Action::Sell, Action::Hold};
  Kind kind_;
};

std::string_view to_string(ActionSet::Kind k);

/// Cash b and whole asset units pi. Both stay non-negative.
struct Portfolio {
  double cash = 0.0;
  std::int64_t holdings = 0;

  friend bool operator==(const Portfolio&, const Portfolio&) = default;
};

/// One-unit trade at `price`. Infeasible trades (insufficient cash, nothing to
/// sell, or a non-positive price) leave the portfolio unchanged.
Portfolio apply_action(Portfolio pf, Action a, double price);

/// cash + holdings * price.
inline double portfolio_value(const Portfolio& pf, double price) {
  return pf.cash + static_cast<double>(pf.holdings) * price;
}

}  // namespace biasq
