#include "biasq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "biasq/errors.hpp"

namespace biasq {

namespace {
// Relative spread below which a sequence is treated as constant.
constexpr double kFlatTolerance = 1e-14;
}  // namespace

double sharpe_ratio(std::span<const double> returns) {
  if (returns.empty()) throw InputError("Sharpe ratio of an empty return sequence");
  const double n = static_cast<double>(returns.size());
  const double mean = std::accumulate(returns.begin(), returns.end(), 0.0) / n;
  double ss = 0.0;
  double scale = 0.0;
  for (double r : returns) {
    ss += (r - mean) * (r - mean);
    scale = std::max(scale, std::abs(r));
  }
  const double sd = std::sqrt(ss / n);
  if (sd <= kFlatTolerance * scale) return 0.0;
  return mean / sd;
}

double cumulative_return(std::span<const double> returns) {
  return std::accumulate(returns.begin(), returns.end(), 0.0);
}

EpochMetrics epoch_metrics(std::size_t epoch_index, std::span<const double> returns) {
  return {epoch_index, returns.empty() ? 0.0 : sharpe_ratio(returns), cumulative_return(returns)};
}

}  // namespace biasq
