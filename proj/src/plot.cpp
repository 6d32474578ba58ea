#include "gsquid/plot.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace gsquid {

namespace {

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish(double pad) {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo <= 0.0) {
      const double d = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
      lo -= d;
      hi += d;
    }
    const double span = hi - lo;
    lo -= pad * span;
    hi += pad * span;
  }
};

class Panel {
 public:
  Panel(double x, double y, double w, double h, Range xr, Range yr)
      : x_(x), y_(y), w_(w), h_(h), xr_(xr), yr_(yr) {}

  double px(double v) const { return x_ + (v - xr_.lo) / (xr_.hi - xr_.lo) * w_; }
  double py(double v) const { return y_ + h_ - (v - yr_.lo) / (yr_.hi - yr_.lo) * h_; }

  std::string frame(const std::string& xlabel, const std::string& ylabel) const {
    std::string s = fmt::format(
        "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
        "stroke=\"#333\"/>\n",
        x_, y_, w_, h_);
    for (int k = 0; k <= 4; ++k) {
      const double xv = xr_.lo + (xr_.hi - xr_.lo) * k / 4.0;
      const double yv = yr_.lo + (yr_.hi - yr_.lo) * k / 4.0;
      s += fmt::format(
          "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"middle\">{:.3g}</text>\n",
          px(xv), y_ + h_ + 14, xv);
      s += fmt::format(
          "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"end\">{:.3g}</text>\n",
          x_ - 4, py(yv) + 4, yv);
    }
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
                     x_ + w_ / 2, y_ + h_ + 32, xlabel);
    s += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"13\" text-anchor=\"middle\" "
        "transform=\"rotate(-90 {:.2f} {:.2f})\">{}</text>\n",
        x_ - 52, y_ + h_ / 2, x_ - 52, y_ + h_ / 2, ylabel);
    return s;
  }

  std::string polyline(const std::vector<std::pair<double, double>>& pts, const std::string& style) const {
    std::string s;
    std::string run;
    auto flush = [&] {
      if (!run.empty()) s += fmt::format("<polyline fill=\"none\" {} points=\"{}\"/>\n", style, run);
      run.clear();
    };
    for (const auto& [x, y] : pts) {
      if (!std::isfinite(x) || !std::isfinite(y)) {
        flush();
        continue;
      }
      run += fmt::format("{}{:.2f},{:.2f}", run.empty() ? "" : " ", px(x), py(y));
    }
    flush();
    return s;
  }

 private:
  double x_, y_, w_, h_;
  Range xr_, yr_;
};

std::string header(int w, int h, const std::string& title) {
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      w, h, w, h);
  if (!title.empty()) {
    s += fmt::format("<text x=\"{}\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n", w / 2, title);
  }
  return s;
}

const char* kFluxLabel = "Φ_ext / Φ₀";

}  // namespace

std::string pattern_svg(const InterferencePattern& pattern, const std::string& title) {
  std::vector<std::pair<double, double>> pts;
  Range xr, yr;
  yr.add(0.0);
  for (const auto& s : pattern.segments) {
    if (s.zero_inductance) continue;
    pts.emplace_back(s.phi_lo / pattern.phi0, s.at(s.phi_lo));
    pts.emplace_back(s.phi_hi / pattern.phi0, s.at(s.phi_hi));
  }
  if (pts.empty()) {
    for (const auto& s : pattern.samples) pts.emplace_back(s.phi_ext / pattern.phi0, s.i_c);
  }
  for (const auto& [x, y] : pts) {
    xr.add(x);
    yr.add(y);
  }
  xr.finish(0.0);
  yr.finish(0.05);
  const Panel panel(80, 40, 640, 380, xr, yr);
  std::string s = header(760, 480, title);
  s += panel.frame(kFluxLabel, "I_in");
  s += panel.polyline(pts, "stroke=\"#c53030\" stroke-width=\"2\"");
  for (const auto& v : pattern.vertices) {
    s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n",
                     panel.px(v.phi_ext / pattern.phi0), panel.py(v.i_in), v.jump ? "#2b6cb0" : "#222");
  }
  return s + "</svg>\n";
}

std::string region_map_svg(const RegionMap& map, double phi0, const std::string& title) {
  Range xr, yr;
  for (double p : map.phi_ext) xr.add(p / phi0);
  for (double i : map.i_in) yr.add(i);
  xr.finish(0.0);
  yr.finish(0.0);
  const Panel panel(80, 40, 560, 380, xr, yr);
  auto edges = [](const std::vector<double>& g, double scale) {
    std::vector<double> e(g.size() + 1);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double left = k == 0 ? (g.size() > 1 ? g[0] - 0.5 * (g[1] - g[0]) : g[0] - 0.5) : 0.5 * (g[k - 1] + g[k]);
      e[k] = left / scale;
    }
    const std::size_t n = g.size();
    e[n] = (n > 1 ? g[n - 1] + 0.5 * (g[n - 1] - g[n - 2]) : g[0] + 0.5) / scale;
    return e;
  };
  const auto ex = edges(map.phi_ext, phi0);
  const auto ey = edges(map.i_in, 1.0);
  auto color = [](CellState c) {
    switch (c) {
      case CellState::Superconducting: return "#2b6cb0";
      case CellState::Normal: return "#f6e05e";
      case CellState::GateLimited: return "#9b2c2c";
    }
    return "#000";
  };
  std::string s = header(820, 480, title);
  for (std::size_t r = 0; r < map.i_in.size(); ++r) {
    for (std::size_t c = 0; c < map.phi_ext.size(); ++c) {
      const double x0 = std::max(panel.px(ex[c]), panel.px(xr.lo));
      const double x1 = std::min(panel.px(ex[c + 1]), panel.px(xr.hi));
      const double y0 = std::max(panel.py(ey[r + 1]), panel.py(yr.hi));
      const double y1 = std::min(panel.py(ey[r]), panel.py(yr.lo));
      s += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                       x0, y0, std::max(x1 - x0, 0.0), std::max(y1 - y0, 0.0), color(map.at(r, c)));
    }
  }
  s += panel.frame(kFluxLabel, "I_in");
  const CellState states[] = {CellState::Superconducting, CellState::Normal, CellState::GateLimited};
  for (int k = 0; k < 3; ++k) {
    s += fmt::format("<rect x=\"660\" y=\"{}\" width=\"14\" height=\"14\" fill=\"{}\"/>\n", 60 + 24 * k,
                     color(states[k]));
    s += fmt::format("<text x=\"680\" y=\"{}\" font-size=\"12\">{}</text>\n", 72 + 24 * k,
                     cell_state_name(states[k]));
  }
  return s + "</svg>\n";
}

std::string oracle_svg(const ComparisonReport& report, const std::vector<StabilityRegion>& lobes,
                       double phi0, const std::string& title) {
  Range xr, yr, er;
  for (double p : report.phi_ext) xr.add(p / phi0);
  for (double v : report.exact) yr.add(v);
  for (double v : report.linear) yr.add(v);
  for (const auto& l : lobes) {
    for (std::size_t k = 0; k < l.phi_ext.size(); ++k) {
      xr.add(l.phi_ext[k] / phi0);
      yr.add(l.upper[k]);
      yr.add(l.lower[k]);
    }
  }
  er.add(0.0);
  for (double e : report.error) er.add(e);
  xr.finish(0.0);
  yr.finish(0.05);
  er.finish(0.05);
  const Panel top(80, 40, 640, 330, xr, yr);
  const Panel bottom(80, 430, 640, 120, xr, er);
  std::string s = header(760, 610, title);
  s += top.frame("", "I_in / I*");
  s += bottom.frame(kFluxLabel, "|error| / I*");

  const char* palette[] = {"#90cdf4", "#9ae6b4", "#fbd38d", "#d6bcfa", "#feb2b2", "#b2f5ea", "#e2e8f0"};
  for (std::size_t k = 0; k < lobes.size(); ++k) {
    const auto& l = lobes[k];
    std::vector<std::pair<double, double>> up, lo;
    for (std::size_t i = 0; i < l.phi_ext.size(); ++i) {
      up.emplace_back(l.phi_ext[i] / phi0, l.upper[i]);
      lo.emplace_back(l.phi_ext[i] / phi0, l.lower[i]);
    }
    const std::string style = fmt::format("stroke=\"{}\" stroke-width=\"1.5\"", palette[k % 7]);
    s += top.polyline(up, style);
    s += top.polyline(lo, style);
  }
  std::vector<std::pair<double, double>> ex, li, err;
  for (std::size_t k = 0; k < report.phi_ext.size(); ++k) {
    ex.emplace_back(report.phi_ext[k] / phi0, report.exact[k]);
    li.emplace_back(report.phi_ext[k] / phi0, report.linear[k]);
    err.emplace_back(report.phi_ext[k] / phi0, report.error[k]);
  }
  s += top.polyline(ex, "stroke=\"#1a202c\" stroke-width=\"2\"");
  s += top.polyline(li, "stroke=\"#c53030\" stroke-width=\"1.5\" stroke-dasharray=\"5,3\"");
  s += bottom.polyline(err, "stroke=\"#2b6cb0\" stroke-width=\"1.5\"");
  s += "<text x=\"600\" y=\"58\" font-size=\"12\" fill=\"#1a202c\">exact</text>\n";
  s += "<text x=\"600\" y=\"74\" font-size=\"12\" fill=\"#c53030\">linearized</text>\n";
  return s + "</svg>\n";
}

}  // namespace gsquid
