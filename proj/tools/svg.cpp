// Copyright 2026 The costbo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace costbo::cli {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};

std::string fmt(double v, int precision = 2) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("0");
}

std::string tick_label(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 4);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("?");
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

double finite_or(double v, double fallback) { return std::isfinite(v) ? v : fallback; }

/// Round step (1, 2 or 5 times a power of ten) giving about `n` ticks.
double nice_step(double span, int n) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / n;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  return (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  double step = 0.2;

  static Axis fit(double lo, double hi, int ticks = 5) {
    if (!(hi > lo)) {
      hi = lo + (lo == 0.0 ? 1.0 : std::abs(lo) * 0.5);
      lo -= lo == 0.0 ? 0.0 : std::abs(lo) * 0.5;
    }
    Axis a;
    a.step = nice_step(hi - lo, ticks);
    a.lo = std::floor(lo / a.step) * a.step;
    a.hi = std::ceil(hi / a.step) * a.step;
    return a;
  }
};

class Canvas {
 public:
  Canvas(const std::string& title) {
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kWidth, 0)
         << "\" height=\"" << fmt(kHeight, 0) << "\" viewBox=\"0 0 " << fmt(kWidth, 0) << ' '
         << fmt(kHeight, 0) << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
         << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    text(kWidth / 2, 22, title, "middle", 14);
  }

  double px(double v) const { return kLeft + (v - x_.lo) / (x_.hi - x_.lo) * plot_w(); }
  double py(double v) const { return kTop + (y_.hi - v) / (y_.hi - y_.lo) * plot_h(); }
  static double plot_w() { return kWidth - kLeft - kRight; }
  static double plot_h() { return kHeight - kTop - kBottom; }

  void set_axes(Axis x, Axis y) {
    x_ = x;
    y_ = y;
  }

  void y_axis(const std::string& label) {
    for (double v = y_.lo; v <= y_.hi + 1e-9 * y_.step; v += y_.step) {
      line(kLeft, py(v), kLeft + plot_w(), py(v), "#e0e0e0");
      text(kLeft - 6, py(v) + 4, tick_label(v), "end");
    }
    line(kLeft, kTop, kLeft, kTop + plot_h(), "black");
    out_ << "<text x=\"16\" y=\"" << fmt(kTop + plot_h() / 2) << "\" text-anchor=\"middle\" "
         << "transform=\"rotate(-90 16 " << fmt(kTop + plot_h() / 2) << ")\">" << escape(label)
         << "</text>\n";
  }

  void x_axis(const std::string& label) {
    line(kLeft, kTop + plot_h(), kLeft + plot_w(), kTop + plot_h(), "black");
    for (double v = x_.lo; v <= x_.hi + 1e-9 * x_.step; v += x_.step) {
      line(px(v), kTop + plot_h(), px(v), kTop + plot_h() + 4, "black");
      text(px(v), kTop + plot_h() + 16, tick_label(v), "middle");
    }
    text(kLeft + plot_w() / 2, kHeight - 16, label, "middle");
  }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double width = 1.0) {
    out_ << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2)
         << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
         << fmt(width, 1) << "\"/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill) {
    out_ << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w)
         << "\" height=\"" << fmt(h) << "\" fill=\"" << fill << "\"/>\n";
  }

  void text(double x, double y, const std::string& s, const std::string& anchor = "start",
            int size = 12) {
    out_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" text-anchor=\"" << anchor
         << "\"" << (size != 12 ? " font-size=\"" + std::to_string(size) + "\"" : std::string())
         << ">" << escape(s) << "</text>\n";
  }

  void raw(const std::string& s) { out_ << s; }

  void legend(std::size_t row, const std::string& color, const std::string& label) {
    const double x = kWidth - kRight + 16;
    const double y = kTop + 8 + 18.0 * double(row);
    rect(x, y - 9, 12, 12, color);
    text(x + 18, y + 1, label);
  }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  std::ostringstream out_;
  Axis x_;
  Axis y_;
};

}  // namespace

std::string bar_chart_svg(const std::vector<CellStats>& cells, const std::string& title) {
  Canvas c(title);
  std::vector<std::string> groups;
  std::vector<std::string> rules;
  for (const CellStats& cell : cells) {
    if (std::find(groups.begin(), groups.end(), cell.acquisition) == groups.end()) {
      groups.push_back(cell.acquisition);
    }
    if (std::find(rules.begin(), rules.end(), cell.rule) == rules.end()) rules.push_back(cell.rule);
  }
  double lo = 0.0;
  double hi = 0.0;
  for (const CellStats& cell : cells) {
    const double m = finite_or(cell.mean_car, 0.0);
    const double e = finite_or(cell.two_se_car, 0.0);
    lo = std::min(lo, m - e);
    hi = std::max(hi, m + e);
  }
  c.set_axes(Axis{0.0, 1.0, 1.0}, Axis::fit(lo, hi));
  c.y_axis("cost-adjusted regret (mean +/- 2 SE)");
  c.x_axis("acquisition function");

  const double group_w = Canvas::plot_w() / double(std::max<std::size_t>(groups.size(), 1));
  const double bar_w = 0.8 * group_w / double(std::max<std::size_t>(rules.size(), 1));
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double x0 = kLeft + group_w * double(g) + 0.1 * group_w;
    c.text(kLeft + group_w * (double(g) + 0.5), kTop + Canvas::plot_h() + 32, groups[g], "middle");
    for (const CellStats& cell : cells) {
      if (cell.acquisition != groups[g]) continue;
      const auto r = std::size_t(std::find(rules.begin(), rules.end(), cell.rule) - rules.begin());
      const double m = finite_or(cell.mean_car, 0.0);
      const double e = finite_or(cell.two_se_car, 0.0);
      const double x = x0 + bar_w * double(r);
      const double top = c.py(std::max(m, 0.0));
      const double bottom = c.py(std::min(m, 0.0));
      c.rect(x + 1, top, bar_w - 2, bottom - top, kPalette[r % std::size(kPalette)]);
      const double cx = x + bar_w / 2;
      c.line(cx, c.py(m - e), cx, c.py(m + e), "black");
      c.line(cx - 3, c.py(m - e), cx + 3, c.py(m - e), "black");
      c.line(cx - 3, c.py(m + e), cx + 3, c.py(m + e), "black");
    }
  }
  for (std::size_t r = 0; r < rules.size(); ++r) {
    c.legend(r, kPalette[r % std::size(kPalette)], rules[r]);
  }
  return c.finish();
}

std::string curve_chart_svg(const std::vector<CurveSeries>& series,
                            const std::vector<CellStats>& hindsight, const std::string& title) {
  Canvas c(title);
  double xlo = INFINITY;
  double xhi = -INFINITY;
  double ylo = INFINITY;
  double yhi = -INFINITY;
  for (const CurveSeries& s : series) {
    for (const CurvePoint& p : s.points) {
      const double e = finite_or(p.two_se, 0.0);
      xlo = std::min(xlo, double(p.t));
      xhi = std::max(xhi, double(p.t));
      ylo = std::min(ylo, p.mean - e);
      yhi = std::max(yhi, p.mean + e);
    }
  }
  for (const CellStats& h : hindsight) {
    xlo = std::min(xlo, h.mean_stop);
    xhi = std::max(xhi, h.mean_stop);
    ylo = std::min(ylo, h.mean_car);
    yhi = std::max(yhi, h.mean_car);
  }
  if (!std::isfinite(xlo)) {
    xlo = 0.0;
    xhi = 1.0;
    ylo = 0.0;
    yhi = 1.0;
  }
  c.set_axes(Axis::fit(xlo, xhi, 8), Axis::fit(ylo, yhi));
  c.y_axis("cost-adjusted regret (mean +/- 2 SE)");
  c.x_axis("stop iteration t");

  std::size_t row = 0;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const CurveSeries& s = series[k];
    const std::string color = kPalette[k % std::size(kPalette)];
    std::ostringstream band;
    std::ostringstream path;
    band << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" points=\"";
    for (const CurvePoint& p : s.points) {
      band << fmt(c.px(double(p.t))) << ',' << fmt(c.py(p.mean + finite_or(p.two_se, 0.0)))
           << ' ';
    }
    for (auto it = s.points.rbegin(); it != s.points.rend(); ++it) {
      band << fmt(c.px(double(it->t))) << ',' << fmt(c.py(it->mean - finite_or(it->two_se, 0.0)))
           << ' ';
    }
    band << "\"/>\n";
    path << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const CurvePoint& p : s.points) {
      path << fmt(c.px(double(p.t))) << ',' << fmt(c.py(p.mean)) << ' ';
    }
    path << "\"/>\n";
    c.raw(band.str());
    c.raw(path.str());
    c.legend(row++, color, s.acquisition);
    for (const CellStats& h : hindsight) {
      if (h.acquisition != s.acquisition) continue;
      std::ostringstream marker;
      marker << "<circle class=\"hindsight\" cx=\"" << fmt(c.px(h.mean_stop)) << "\" cy=\""
             << fmt(c.py(h.mean_car)) << "\" r=\"5\" fill=\"white\" stroke=\"" << color
             << "\" stroke-width=\"2\"><title>hindsight " << escape(h.acquisition)
             << "</title></circle>\n";
      c.raw(marker.str());
    }
  }
  if (!hindsight.empty()) {
    const double x = kWidth - kRight + 16;
    const double y = kTop + 8 + 18.0 * double(row);
    std::ostringstream key;
    key << "<circle cx=\"" << fmt(x + 6) << "\" cy=\"" << fmt(y - 3)
        << "\" r=\"5\" fill=\"white\" stroke=\"black\" stroke-width=\"2\"/>\n";
    c.raw(key.str());
    c.text(x + 18, y + 1, "hindsight optimum");
  }
  return c.finish();
}

}  // namespace costbo::cli
