// Copyright 2026 The GaitForge Authors
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

#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace gaitforge::cli {
namespace {

constexpr double kPanelW = 320.0;
constexpr double kPanelH = 240.0;
constexpr double kMarginL = 56.0;
constexpr double kMarginR = 12.0;
constexpr double kMarginT = 28.0;
constexpr double kMarginB = 40.0;

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string Px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') {
      out += "&lt;";
    } else if (c == '>') {
      out += "&gt;";
    } else if (c == '&') {
      out += "&amp;";
    } else {
      out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void Add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void Finish() {
    if (!(lo <= hi)) lo = hi = 0.0;
    if (hi - lo < 1e-12) {
      const double pad = std::max(1e-3, std::abs(lo) * 0.05);
      lo -= pad;
      hi += pad;
    }
  }
};

void DrawPanel(std::ostream& out, const Panel& p, double ox, double oy) {
  Range rx, ry;
  for (const auto& s : p.series) {
    for (double v : s.x) rx.Add(v);
    for (double v : s.y) ry.Add(v);
  }
  rx.Finish();
  ry.Finish();
  const double w = kPanelW - kMarginL - kMarginR;
  const double h = kPanelH - kMarginT - kMarginB;
  const double left = ox + kMarginL;
  const double top = oy + kMarginT;
  const auto sx = [&](double v) { return left + (v - rx.lo) / (rx.hi - rx.lo) * w; };
  const auto sy = [&](double v) { return top + h - (v - ry.lo) / (ry.hi - ry.lo) * h; };

  out << "<rect x=\"" << Px(left) << "\" y=\"" << Px(top) << "\" width=\"" << Px(w)
      << "\" height=\"" << Px(h) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  out << "<text x=\"" << Px(left + w / 2) << "\" y=\"" << Px(oy + 18)
      << "\" text-anchor=\"middle\" font-size=\"13\">" << Escape(p.title) << "</text>\n";
  out << "<text x=\"" << Px(left + w / 2) << "\" y=\"" << Px(top + h + 32)
      << "\" text-anchor=\"middle\" font-size=\"11\">" << Escape(p.x_label) << "</text>\n";
  out << "<text x=\"" << Px(ox + 12) << "\" y=\"" << Px(top + h / 2)
      << "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 " << Px(ox + 12)
      << ' ' << Px(top + h / 2) << ")\">" << Escape(p.y_label) << "</text>\n";
  out << "<text x=\"" << Px(left) << "\" y=\"" << Px(top + h + 14)
      << "\" font-size=\"10\">" << Num(rx.lo) << "</text>\n";
  out << "<text x=\"" << Px(left + w) << "\" y=\"" << Px(top + h + 14)
      << "\" text-anchor=\"end\" font-size=\"10\">" << Num(rx.hi) << "</text>\n";
  out << "<text x=\"" << Px(left - 4) << "\" y=\"" << Px(top + h)
      << "\" text-anchor=\"end\" font-size=\"10\">" << Num(ry.lo) << "</text>\n";
  out << "<text x=\"" << Px(left - 4) << "\" y=\"" << Px(top + 8)
      << "\" text-anchor=\"end\" font-size=\"10\">" << Num(ry.hi) << "</text>\n";

  double legend_y = top + 12;
  for (const auto& s : p.series) {
    const size_t n = std::min(s.x.size(), s.y.size());
    bool collapsed = n > 0;
    for (size_t i = 1; i < n && collapsed; ++i) {
      collapsed = s.x[i] == s.x[0] && s.y[i] == s.y[0];
    }
    if (collapsed) {
      out << "<circle cx=\"" << Px(sx(s.x[0])) << "\" cy=\"" << Px(sy(s.y[0]))
          << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
    } else if (n > 0) {
      out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1\" points=\"";
      for (size_t i = 0; i < n; ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        out << Px(sx(s.x[i])) << ',' << Px(sy(s.y[i])) << (i + 1 < n ? " " : "");
      }
      out << "\"/>\n";
      if (s.markers) {
        for (size_t i = 0; i < n; ++i) {
          out << "<circle cx=\"" << Px(sx(s.x[i])) << "\" cy=\"" << Px(sy(s.y[i]))
              << "\" r=\"2\" fill=\"" << s.color << "\"/>\n";
        }
      }
    }
    if (!s.label.empty()) {
      out << "<text x=\"" << Px(left + w - 4) << "\" y=\"" << Px(legend_y)
          << "\" text-anchor=\"end\" font-size=\"10\" fill=\"" << s.color << "\">"
          << Escape(s.label) << "</text>\n";
      legend_y += 12;
    }
  }
}

}  // namespace

std::string RenderSvg(const std::vector<Panel>& panels, int columns, const std::string& title) {
  columns = std::max(1, columns);
  const int rows = static_cast<int>((panels.size() + columns - 1) / columns);
  const double width = columns * kPanelW;
  const double height = rows * kPanelH + 30.0;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Px(width) << "\" height=\""
      << Px(height) << "\" viewBox=\"0 0 " << Px(width) << ' ' << Px(height)
      << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << Px(width / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">"
      << Escape(title) << "</text>\n";
  for (size_t i = 0; i < panels.size(); ++i) {
    const double ox = (i % columns) * kPanelW;
    const double oy = 30.0 + (i / columns) * kPanelH;
    DrawPanel(out, panels[i], ox, oy);
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace gaitforge::cli
