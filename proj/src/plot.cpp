#include "biasq/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "biasq/results_io.hpp"

namespace biasq {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_line_chart_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<LineSeries>& series, std::ostream& out) {
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : series) {
    for (double v : s.x) x_lo = std::min(x_lo, v), x_hi = std::max(x_hi, v);
    for (double v : s.y) {
      if (std::isfinite(v)) y_lo = std::min(y_lo, v), y_hi = std::max(y_hi, v);
    }
  }
  if (!std::isfinite(x_lo)) x_lo = 0.0, x_hi = 1.0;
  if (!std::isfinite(y_lo)) y_lo = 0.0, y_hi = 1.0;
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi == y_lo) y_lo -= 0.5, y_hi += 0.5;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * pw; };
  const auto py = [&](double y) { return kTop + (1.0 - (y - y_lo) / (y_hi - y_lo)) * ph; };

  fmt::print(out,
             "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
             "font-family=\"sans-serif\" font-size=\"11\">\n",
             kWidth, kHeight, kWidth, kHeight);
  fmt::print(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
  fmt::print(out, "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", kLeft + pw / 2,
             escape(title));
  fmt::print(out, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n", kLeft, kTop,
             pw, ph);

  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double fx = x_lo + (x_hi - x_lo) * i / kTicks;
    const double fy = y_lo + (y_hi - y_lo) * i / kTicks;
    fmt::print(out, "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.4g}</text>\n", px(fx),
               kTop + ph + 16, fx);
    fmt::print(out, "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.4g}</text>\n", kLeft - 6, py(fy) + 4, fy);
    fmt::print(out, "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#ddd\"/>\n", kLeft, py(fy),
               kLeft + pw, py(fy));
  }
  if (y_lo < 0.0 && y_hi > 0.0) {
    fmt::print(out, "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#888\"/>\n", kLeft, py(0.0),
               kLeft + pw, py(0.0));
  }
  fmt::print(out, "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", kLeft + pw / 2, kHeight - 12,
             escape(x_label));
  fmt::print(out,
             "<text x=\"16\" y=\"{:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1f})\">{}</text>\n",
             kTop + ph / 2, kTop + ph / 2, escape(y_label));

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* colour = kPalette[i % std::size(kPalette)];
    out << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << colour << "\" points=\"";
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (!std::isfinite(s.y[k])) continue;
      fmt::print(out, "{}{:.2f},{:.2f}", k ? " " : "", px(s.x[k]), py(s.y[k]));
    }
    out << "\"/>\n";
    const double ly = kTop + 12 + 16.0 * static_cast<double>(i);
    fmt::print(out, "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
               kLeft + pw + 10, ly - 4, kLeft + pw + 28, ly - 4, colour);
    fmt::print(out, "<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", kLeft + pw + 32, ly, escape(s.name));
  }
  out << "</svg>\n";
}

std::vector<std::filesystem::path> plot_results(const std::filesystem::path& long_csv,
                                                const std::filesystem::path& out_dir) {
  const std::vector<LongRow> rows = read_long_csv(long_csv);

  // sweep -> config -> series, both in first-seen order
  std::vector<std::string> sweep_order;
  std::map<std::string, std::vector<std::string>> configs;
  std::map<std::string, LineSeries> sharpe, ret;
  for (const LongRow& r : rows) {
    const auto colon = r.config_id.find(':');
    const std::string sweep = colon == std::string::npos ? r.config_id : r.config_id.substr(0, colon);
    const std::string name = colon == std::string::npos ? r.config_id : r.config_id.substr(colon + 1);
    if (!configs.contains(sweep)) sweep_order.push_back(sweep);
    auto& cfgs = configs[sweep];
    if (std::find(cfgs.begin(), cfgs.end(), r.config_id) == cfgs.end()) {
      cfgs.push_back(r.config_id);
      sharpe[r.config_id].name = name;
      ret[r.config_id].name = name;
    }
    sharpe[r.config_id].x.push_back(static_cast<double>(r.epoch));
    sharpe[r.config_id].y.push_back(r.sharpe);
    ret[r.config_id].x.push_back(static_cast<double>(r.epoch));
    ret[r.config_id].y.push_back(r.cumulative_return);
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error(fmt::format("cannot create '{}': {}", out_dir.string(), ec.message()));

  std::vector<std::filesystem::path> written;
  for (const std::string& sweep : sweep_order) {
    for (const auto& [metric, table] : {std::pair{"sharpe", &sharpe}, std::pair{"cumulative_return", &ret}}) {
      std::vector<LineSeries> lines;
      for (const auto& id : configs[sweep]) lines.push_back(table->at(id));
      const auto path = out_dir / fmt::format("{}_{}.svg", sweep, metric);
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
      write_line_chart_svg(fmt::format("{}: {} per epoch", sweep, metric), "epoch", metric, lines, out);
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace biasq
