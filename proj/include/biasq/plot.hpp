#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace biasq {

struct LineSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal standalone SVG line chart with axes, tick labels and a legend.
void write_line_chart_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<LineSeries>& series, std::ostream& out);

/// Reads a long results CSV and writes <sweep>_sharpe.svg and
/// <sweep>_cumulative_return.svg per sweep (config_id prefix before ':').
/// Returns the written paths in sweep order.
std::vector<std::filesystem::path> plot_results(const std::filesystem::path& long_csv,
                                                const std::filesystem::path& out_dir);

}  // namespace biasq
