#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "covsim/engine.hpp"
#include "covsim/io.hpp"
#include "covsim/scenario.hpp"

namespace covsim {
namespace svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

namespace detail {

inline constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
inline constexpr int palette_size = 8;

inline std::string num(double v) {
  const double r = std::round(v * 100.0) / 100.0;
  std::string s = fmt_double(r);
  return s;
}

}  // namespace detail

/// Minimal line plot: fixed 760x420 canvas, optional log y axis.
/// Non-finite and (in log mode) non-positive samples are clamped to the floor.
inline std::string line_plot(const std::string& title, const std::string& x_label,
                             const std::string& y_label, const std::vector<Series>& series,
                             bool log_y, double y_floor = 1e-16,
                             const std::vector<double>& hlines = {}) {
  const double width = 760, height = 420;
  const double left = 70, right = 20, top = 36, bottom = 46;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  bool any = false;
  auto y_value = [&](double y) {
    if (!std::isfinite(y)) return y_floor;
    if (log_y && y < y_floor) return y_floor;
    return y;
  };
  for (const Series& s : series) {
    for (std::size_t i = 0; i != s.x.size(); ++i) {
      const double xv = s.x[i], yv = y_value(s.y[i]);
      if (!std::isfinite(xv)) continue;
      if (!any) {
        x_min = x_max = xv;
        y_min = y_max = yv;
        any = true;
      } else {
        x_min = std::min(x_min, xv);
        x_max = std::max(x_max, xv);
        y_min = std::min(y_min, yv);
        y_max = std::max(y_max, yv);
      }
    }
  }
  for (double h : hlines) {
    const double yv = y_value(h);
    if (!any) {
      y_min = y_max = yv;
    } else {
      y_min = std::min(y_min, yv);
      y_max = std::max(y_max, yv);
    }
  }
  if (x_max - x_min < 1e-300) x_max = x_min + 1.0;
  auto y_t = [&](double y) { return log_y ? std::log10(y_value(y)) : y_value(y); };
  double ty_min = y_t(y_min), ty_max = y_t(y_max);
  if (ty_max - ty_min < 1e-12) {
    ty_min -= 0.5;
    ty_max += 0.5;
  }
  const double pad = 0.04 * (ty_max - ty_min);
  ty_min -= pad;
  ty_max += pad;

  auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return top + (ty_max - y_t(y)) / (ty_max - ty_min) * plot_h; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::num(width) +
         "\" height=\"" + detail::num(height) + "\" viewBox=\"0 0 " + detail::num(width) +
         " " + detail::num(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + detail::num(width / 2) +
         "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
         title + "</text>\n";

  out += "<rect x=\"" + detail::num(left) + "\" y=\"" + detail::num(top) + "\" width=\"" +
         detail::num(plot_w) + "\" height=\"" + detail::num(plot_h) +
         "\" fill=\"none\" stroke=\"#333\"/>\n";

  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    const double fx = x_min + (x_max - x_min) * i / ticks;
    const double gx = px(fx);
    out += "<line x1=\"" + detail::num(gx) + "\" y1=\"" + detail::num(top + plot_h) +
           "\" x2=\"" + detail::num(gx) + "\" y2=\"" + detail::num(top + plot_h + 5) +
           "\" stroke=\"#333\"/>\n";
    out += "<text x=\"" + detail::num(gx) + "\" y=\"" + detail::num(top + plot_h + 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           detail::num(fx) + "</text>\n";

    const double ft = ty_min + (ty_max - ty_min) * i / ticks;
    const double gy = top + (ty_max - ft) / (ty_max - ty_min) * plot_h;
    out += "<line x1=\"" + detail::num(left - 5) + "\" y1=\"" + detail::num(gy) + "\" x2=\"" +
           detail::num(left) + "\" y2=\"" + detail::num(gy) + "\" stroke=\"#333\"/>\n";
    const double label = log_y ? std::pow(10.0, ft) : ft;
    std::string text = log_y ? ("1e" + detail::num(ft)) : detail::num(label);
    out += "<text x=\"" + detail::num(left - 8) + "\" y=\"" + detail::num(gy + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + text +
           "</text>\n";
  }
  out += "<text x=\"" + detail::num(left + plot_w / 2) + "\" y=\"" +
         detail::num(height - 8) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + x_label +
         "</text>\n";
  out += "<text x=\"16\" y=\"" + detail::num(top + plot_h / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 " +
         detail::num(top + plot_h / 2) + ")\">" + y_label + "</text>\n";

  for (double h : hlines) {
    out += "<line x1=\"" + detail::num(left) + "\" y1=\"" + detail::num(py(h)) + "\" x2=\"" +
           detail::num(left + plot_w) + "\" y2=\"" + detail::num(py(h)) +
           "\" stroke=\"#999\" stroke-dasharray=\"6 4\"/>\n";
  }

  int color = 0;
  for (const Series& s : series) {
    std::string points;
    for (std::size_t i = 0; i != s.x.size(); ++i) {
      if (!std::isfinite(s.x[i])) continue;
      points += detail::num(px(s.x[i])) + "," + detail::num(py(s.y[i])) + " ";
    }
    out += "<polyline fill=\"none\" stroke=\"" +
           std::string(detail::palette[color % detail::palette_size]) +
           "\" stroke-width=\"1.2\" points=\"" + points + "\"/>\n";
    if (series.size() <= 8 && !s.label.empty()) {
      const double ly = top + 14 + 14 * color;
      out += "<line x1=\"" + detail::num(left + plot_w - 110) + "\" y1=\"" + detail::num(ly) +
             "\" x2=\"" + detail::num(left + plot_w - 90) + "\" y2=\"" + detail::num(ly) +
             "\" stroke=\"" + std::string(detail::palette[color % detail::palette_size]) +
             "\" stroke-width=\"2\"/>\n";
      out += "<text x=\"" + detail::num(left + plot_w - 84) + "\" y=\"" + detail::num(ly + 4) +
             "\" font-family=\"sans-serif\" font-size=\"11\">" + s.label + "</text>\n";
    }
    ++color;
  }
  out += "</svg>\n";
  return out;
}

inline std::string errors_plot(const SimulationTrace& trace) {
  std::vector<Series> series;
  if (!trace.metrics.empty()) {
    const std::size_t n = trace.metrics.front().e_norm.size();
    series.resize(n);
    for (std::size_t p = 0; p != n; ++p) series[p].label = "agent " + std::to_string(p + 1);
    for (const MetricsRow& row : trace.metrics) {
      for (std::size_t p = 0; p != n; ++p) {
        series[p].x.push_back(row.t);
        series[p].y.push_back(std::max(row.e_norm[p], 1e-16));
      }
    }
  }
  return line_plot("distance to weighted cell centroid", "t", "|e_p|", series, true);
}

inline std::string eta_tilde_plot(const SimulationTrace& trace, double eta_tilde_max) {
  std::vector<Series> series;
  if (!trace.metrics.empty()) {
    const std::size_t n = trace.metrics.front().eta_tilde_norm.size();
    series.resize(n);
    for (std::size_t p = 0; p != n; ++p) series[p].label = "agent " + std::to_string(p + 1);
    for (const MetricsRow& row : trace.metrics) {
      for (std::size_t p = 0; p != n; ++p) {
        series[p].x.push_back(row.t);
        series[p].y.push_back(row.eta_tilde_norm[p]);
      }
    }
  }
  return line_plot("hold error against its budget", "t", "|eta_p - k1 sat(e_p)|", series,
                   false, 1e-16, {eta_tilde_max});
}

inline std::string cost_plot(const SimulationTrace& trace) {
  Series s;
  s.label = "V";
  for (const MetricsRow& row : trace.metrics) {
    s.x.push_back(row.t);
    s.y.push_back(std::max(row.cost, 1e-16));
  }
  return line_plot("locational cost", "t", "V", {s}, true);
}

/// Sawtooth reconstruction of each agent's timer from the event log, shown
/// over an initial window so individual resets stay readable.
inline std::string timers_plot(const SimulationTrace& trace, std::size_t agent_count,
                               double window_end) {
  std::vector<Series> series(agent_count);
  for (std::size_t p = 0; p != agent_count; ++p) {
    series[p].label = "agent " + std::to_string(p + 1);
  }
  std::vector<const HybridEvent*> last(agent_count, nullptr);
  for (const HybridEvent& ev : trace.events) {
    const auto p = static_cast<std::size_t>(ev.agent);
    if (p >= agent_count) continue;
    if (ev.t > window_end) continue;
    if (last[p] != nullptr) {
      const HybridEvent& prev = *last[p];
      series[p].x.push_back(ev.t);
      series[p].y.push_back(prev.tau_new - (ev.t - prev.t));
    }
    series[p].x.push_back(ev.t);
    series[p].y.push_back(ev.tau_new);
    last[p] = &ev;
  }
  for (std::size_t p = 0; p != agent_count; ++p) {
    if (last[p] != nullptr) {
      const HybridEvent& prev = *last[p];
      const double t_end = std::min(window_end, prev.t + prev.tau_new);
      series[p].x.push_back(t_end);
      series[p].y.push_back(prev.tau_new - (t_end - prev.t));
    }
  }
  return line_plot("timer sawtooth (initial window)", "t", "tau_p", series, false);
}

/// The standard --svg bundle for one run.
inline std::vector<std::pair<std::string, std::string>> standard_plots(
    const SimulationTrace& trace, const ScenarioConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("errors.svg", errors_plot(trace));
  files.emplace_back("cost.svg", cost_plot(trace));
  if (const auto* t = std::get_if<TimerControllerParams>(&cfg.controller)) {
    files.emplace_back("eta_tilde.svg", eta_tilde_plot(trace, t->eta_tilde_max));
    double max_T2 = 0.0;
    for (const TimerParams& w : t->timers) max_T2 = std::max(max_T2, w.T2);
    files.emplace_back(
        "timers.svg",
        timers_plot(trace, static_cast<std::size_t>(cfg.agent_count),
                    std::min(cfg.t_final, 50.0 * max_T2)));
  }
  return files;
}

}  // namespace svg
}  // namespace covsim
