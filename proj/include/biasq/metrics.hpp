#pragma once

#include <cstddef>
#include <span>

namespace biasq {

struct EpochMetrics {
  std::size_t epoch_index = 0;
  double sharpe = 0.0;
  double cumulative_return = 0.0;
};

/// mean / population std-dev with a zero risk-free rate. A sequence whose
/// spread is zero relative to its magnitude has Sharpe 0.
/// Throws InputError for an empty sequence.
double sharpe_ratio(std::span<const double> returns);

/// Sum of the sequence; 0 for an empty one.
double cumulative_return(std::span<const double> returns);

EpochMetrics epoch_metrics(std::size_t epoch_index, std::span<const double> returns);

}  // namespace biasq
