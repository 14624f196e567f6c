//
// Copyright 2026 The classdp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "classdp/svg_plot.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace classdp {
namespace {

constexpr double kPanelWidth = 360;
constexpr double kPanelHeight = 300;
constexpr double kMarginLeft = 55;
constexpr double kMarginRight = 15;
constexpr double kMarginTop = 30;
constexpr double kMarginBottom = 45;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b"};

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Escape(const std::string& s) {
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

std::string Tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

void RenderPanel(std::ostringstream& out, const PlotPanel& panel,
                 double offset_x) {
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = 0.0, y_hi = 0.0;
  for (const auto& s : panel.series) {
    for (double v : s.x) x_lo = std::min(x_lo, v), x_hi = std::max(x_hi, v);
    for (double v : s.y) y_lo = std::min(y_lo, v), y_hi = std::max(y_hi, v);
  }
  if (!std::isfinite(x_lo)) x_lo = 0.0, x_hi = 1.0;
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  if (y_hi <= y_lo) y_hi = y_lo + 1.0;

  const double left = offset_x + kMarginLeft;
  const double right = offset_x + kPanelWidth - kMarginRight;
  const double top = kMarginTop;
  const double bottom = kPanelHeight - kMarginBottom;
  auto px = [&](double v) { return left + (v - x_lo) / (x_hi - x_lo) * (right - left); };
  auto py = [&](double v) { return bottom - (v - y_lo) / (y_hi - y_lo) * (bottom - top); };

  out << "<text x=\"" << Num((left + right) / 2) << "\" y=\"18\" "
      << "text-anchor=\"middle\" font-size=\"13\">" << Escape(panel.title)
      << "</text>\n";
  out << "<rect x=\"" << Num(left) << "\" y=\"" << Num(top) << "\" width=\""
      << Num(right - left) << "\" height=\"" << Num(bottom - top)
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x_lo + (x_hi - x_lo) * i / 4.0;
    const double yv = y_lo + (y_hi - y_lo) * i / 4.0;
    out << "<line x1=\"" << Num(px(xv)) << "\" y1=\"" << Num(bottom)
        << "\" x2=\"" << Num(px(xv)) << "\" y2=\"" << Num(bottom + 4)
        << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << Num(px(xv)) << "\" y=\"" << Num(bottom + 16)
        << "\" text-anchor=\"middle\" font-size=\"10\">" << Tick(xv)
        << "</text>\n";
    out << "<line x1=\"" << Num(left - 4) << "\" y1=\"" << Num(py(yv))
        << "\" x2=\"" << Num(left) << "\" y2=\"" << Num(py(yv))
        << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << Num(left - 7) << "\" y=\"" << Num(py(yv) + 3)
        << "\" text-anchor=\"end\" font-size=\"10\">" << Tick(yv)
        << "</text>\n";
  }
  out << "<text x=\"" << Num((left + right) / 2) << "\" y=\""
      << Num(kPanelHeight - 10) << "\" text-anchor=\"middle\" "
      << "font-size=\"11\">" << Escape(panel.x_label) << "</text>\n";
  out << "<text x=\"" << Num(offset_x + 14) << "\" y=\""
      << Num((top + bottom) / 2) << "\" text-anchor=\"middle\" "
      << "font-size=\"11\" transform=\"rotate(-90 " << Num(offset_x + 14)
      << " " << Num((top + bottom) / 2) << ")\">" << Escape(panel.y_label)
      << "</text>\n";

  for (size_t s = 0; s < panel.series.size(); ++s) {
    const auto& series = panel.series[s];
    const char* color = kColors[s % std::size(kColors)];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    const size_t n = std::min(series.x.size(), series.y.size());
    for (size_t i = 0; i < n; ++i) {
      out << (i ? " " : "") << Num(px(series.x[i])) << ","
          << Num(py(series.y[i]));
    }
    out << "\"/>\n";
    const double ly = top + 12 + 14 * static_cast<double>(s);
    out << "<line x1=\"" << Num(right - 110) << "\" y1=\"" << Num(ly - 4)
        << "\" x2=\"" << Num(right - 90) << "\" y2=\"" << Num(ly - 4)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << Num(right - 85) << "\" y=\"" << Num(ly)
        << "\" font-size=\"10\">" << Escape(series.name) << "</text>\n";
  }
}

}  // namespace

std::string RenderSvg(const std::vector<PlotPanel>& panels) {
  const size_t count = std::max<size_t>(panels.size(), 1);
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << Num(kPanelWidth * count) << "\" height=\"" << Num(kPanelHeight)
      << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (size_t i = 0; i < panels.size(); ++i) {
    RenderPanel(out, panels[i], kPanelWidth * static_cast<double>(i));
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace classdp
