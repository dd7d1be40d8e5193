#include "biasq/market_env.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "biasq/errors.hpp"
#include "biasq/rng.hpp"

namespace biasq {

PriceSeries generate_prices(std::uint64_t seed, std::size_t steps, double p0, double sigma) {
  if (steps < 2) throw ConfigError(fmt::format("price series needs at least 2 steps, got {}", steps));
  if (!(sigma >= 0.0)) throw ConfigError(fmt::format("sigma must be >= 0, got {}", sigma));

  PriceSeries series;
  series.p0 = p0;
  series.sigma = sigma;
  series.seed = seed;
  series.prices.reserve(steps);
  series.prices.push_back(p0);

  Rng rng(seed);
  for (std::size_t t = 1; t < steps; ++t) {
    series.prices.push_back(series.prices.back() + sigma * rng.normal());
  }
  return series;
}

void write_csv(const PriceSeries& series, std::ostream& out) {
  out << "t,price\n";
  for (std::size_t t = 0; t < series.size(); ++t) {
    fmt::print(out, "{},{}\n", t, series.prices[t]);
  }
}

Discretizer::Discretizer(std::vector<double> boundaries, std::size_t n_states)
    : boundaries_(std::move(boundaries)), n_states_(n_states) {
  if (n_states_ < 2) throw ConfigError(fmt::format("discretizer needs n >= 2 states, got {}", n_states_));
  if (!boundaries_.empty() && boundaries_.size() != n_states_ - 1) {
    throw ConfigError(fmt::format("expected {} boundaries, got {}", n_states_ - 1, boundaries_.size()));
  }
  if (!std::is_sorted(boundaries_.begin(), boundaries_.end())) {
    throw ConfigError("discretizer boundaries must be sorted");
  }
}

Discretizer Discretizer::fit(std::span<const double> prices, std::size_t n_states) {
  if (n_states < 2) throw ConfigError(fmt::format("discretizer needs n >= 2 states, got {}", n_states));
  if (prices.empty()) throw InputError("cannot fit a discretizer to an empty price series");

  const auto [lo_it, hi_it] = std::minmax_element(prices.begin(), prices.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (hi == lo) return Discretizer({}, n_states);

  std::vector<double> b;
  b.reserve(n_states - 1);
  const double denom = static_cast<double>(n_states - 1);
  for (std::size_t i = 1; i < n_states; ++i) {
    b.push_back(lo + (static_cast<double>(i) / denom) * (hi - lo));
  }
  return Discretizer(std::move(b), n_states);
}

std::size_t Discretizer::state_of(double price) const {
  // number of thresholds <= price
  const auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), price);
  return static_cast<std::size_t>(it - boundaries_.begin());
}

Discretizer fit_discretizer(const PriceSeries& series, std::size_t n_states) {
  return Discretizer::fit(series.prices, n_states);
}

std::string_view to_string(Action a) {
  switch (a) {
    case Action::Buy: return "buy";
    case Action::Sell: return "sell";
    case Action::Hold: return "hold";
  }
  return "?";
}

std::string_view to_string(ActionSet::Kind k) {
  return k == ActionSet::Kind::Full ? "full" : "reduced";
}

bool ActionSet::contains(Action a) const {
  const auto acts = actions();
  return std::find(acts.begin(), acts.end(), a) != acts.end();
}

Portfolio apply_action(Portfolio pf, Action a, double price) {
  if (!(price > 0.0)) return pf;
  switch (a) {
    case Action::Buy:
      if (pf.cash >= price) {
        pf.cash -= price;
        pf.holdings += 1;
      }
      break;
    case Action::Sell:
      if (pf.holdings >= 1) {
        pf.cash += price;
        pf.holdings -= 1;
      }
      break;
    case Action::Hold:
      break;
  }
  return pf;
}

}  // namespace biasq
