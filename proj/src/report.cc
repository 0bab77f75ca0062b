// Copyright 2026 The skillmpc Authors
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

#include "skillmpc/report.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "skillmpc/error.h"

namespace skillmpc {

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string Fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string FormatNumber(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

void CsvTable::AddRow(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size()) {
    throw DimensionError("CSV row has " + std::to_string(cells.size()) + " cells, expected " +
                         std::to_string(columns_.size()));
  }
  rows_.push_back(cells);
}

void CsvTable::AddRow(const std::vector<double>& values) {
  std::vector<std::string> cells;
  for (double v : values) cells.push_back(FormatNumber(v));
  AddRow(cells);
}

std::string CsvTable::ToString() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
    out += "\n";
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
  return out;
}

CsvTable TraceTable(const std::vector<Trajectory>& episodes,
                    const std::vector<std::vector<double>>* rewards) {
  if (episodes.empty() || episodes.front().transitions.empty()) {
    return CsvTable({"episode", "step"});
  }
  const Transition& first = episodes.front().transitions.front();
  std::vector<std::string> cols{"episode", "step"};
  for (int i = 0; i < first.skill.size(); ++i) cols.push_back("z" + std::to_string(i));
  for (int i = 0; i < first.next_state.size(); ++i) cols.push_back("s" + std::to_string(i));
  for (int i = 0; i < first.action.size(); ++i) cols.push_back("a" + std::to_string(i));
  cols.push_back("reward");
  CsvTable table(cols);
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    const auto& tr = episodes[e].transitions;
    for (std::size_t t = 0; t < tr.size(); ++t) {
      std::vector<double> row{static_cast<double>(e), static_cast<double>(tr[t].step_index)};
      for (double v : tr[t].skill) row.push_back(v);
      for (double v : tr[t].next_state) row.push_back(v);
      for (double v : tr[t].action) row.push_back(v);
      row.push_back(rewards ? rewards->at(e).at(t) : tr[t].intrinsic_reward);
      table.AddRow(row);
    }
  }
  return table;
}

std::string SvgLinePlot(const std::vector<Series>& series, const std::string& title,
                        const std::string& x_label, const std::string& y_label,
                        bool equal_axes, const std::vector<Eigen::Vector2d>& markers) {
  const double w = 640, h = 480, ml = 70, mr = 20, mt = 40, mb = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  auto grow = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    x0 = std::min(x0, x); x1 = std::max(x1, x);
    y0 = std::min(y0, y); y1 = std::max(y1, y);
  };
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) grow(s.x[i], s.y[i]);
  }
  for (const auto& m : markers) grow(m.x(), m.y());
  if (!std::isfinite(x0)) { x0 = 0; x1 = 1; y0 = 0; y1 = 1; }
  if (x1 - x0 < 1e-12) { x0 -= 0.5; x1 += 0.5; }
  if (y1 - y0 < 1e-12) { y0 -= 0.5; y1 += 0.5; }
  const double pw = w - ml - mr, ph = h - mt - mb;
  if (equal_axes) {
    const double span = std::max(x1 - x0, (y1 - y0) * pw / ph);
    const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    x0 = cx - span / 2; x1 = cx + span / 2;
    y0 = cy - span * ph / pw / 2; y1 = cy + span * ph / pw / 2;
  }
  auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return mt + ph - (y - y0) / (y1 - y0) * ph; };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + Fmt(w) +
                    "\" height=\"" + Fmt(h) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + Fmt(w / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
         Escape(title) + "</text>\n";
  out += "<rect x=\"" + Fmt(ml) + "\" y=\"" + Fmt(mt) + "\" width=\"" + Fmt(pw) + "\" height=\"" +
         Fmt(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4, yv = y0 + (y1 - y0) * i / 4;
    out += "<text x=\"" + Fmt(px(xv)) + "\" y=\"" + Fmt(h - mb + 16) +
           "\" text-anchor=\"middle\">" + Fmt(xv) + "</text>\n";
    out += "<text x=\"" + Fmt(ml - 6) + "\" y=\"" + Fmt(py(yv) + 4) +
           "\" text-anchor=\"end\">" + Fmt(yv) + "</text>\n";
  }
  out += "<text x=\"" + Fmt(ml + pw / 2) + "\" y=\"" + Fmt(h - 10) + "\" text-anchor=\"middle\">" +
         Escape(x_label) + "</text>\n";
  out += "<text x=\"16\" y=\"" + Fmt(mt + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         Fmt(mt + ph / 2) + ")\">" + Escape(y_label) + "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    std::string pts;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pts += Fmt(px(s.x[i])) + "," + Fmt(py(s.y[i])) + " ";
    }
    const char* color = kPalette[k % 10];
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    if (!s.label.empty() && series.size() <= 12) {
      out += "<text x=\"" + Fmt(ml + 8) + "\" y=\"" + Fmt(mt + 16 + 14 * k) + "\" fill=\"" + color +
             "\">" + Escape(s.label) + "</text>\n";
    }
  }
  for (const auto& m : markers) {
    out += "<circle cx=\"" + Fmt(px(m.x())) + "\" cy=\"" + Fmt(py(m.y())) +
           "\" r=\"5\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string SvgHeadingMap(const std::vector<double>& headings, int resolution,
                          const std::string& title) {
  if (resolution < 1 || static_cast<int>(headings.size()) != resolution * resolution) {
    throw DimensionError("heading map needs resolution^2 cells");
  }
  const double cell = 400.0 / resolution, ox = 60, oy = 40;
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"520\" height=\"500\" "
                    "font-family=\"sans-serif\" font-size=\"12\">\n"
                    "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"260\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + Escape(title) +
         "</text>\n";
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      const double a = headings[i * resolution + j];
      std::string fill = "#bbbbbb";
      if (!std::isnan(a)) {
        double deg = a * 180.0 / std::numbers::pi;
        if (deg < 0) deg += 360.0;
        fill = "hsl(" + Fmt(deg) + ",80%,50%)";
      }
      // z0 grows to the right, z1 grows upward.
      out += "<rect x=\"" + Fmt(ox + i * cell) + "\" y=\"" + Fmt(oy + (resolution - 1 - j) * cell) +
             "\" width=\"" + Fmt(cell) + "\" height=\"" + Fmt(cell) + "\" fill=\"" + fill + "\"/>\n";
    }
  }
  out += "<text x=\"260\" y=\"462\" text-anchor=\"middle\">z0 (-1 to 1)</text>\n";
  out += "<text x=\"30\" y=\"240\" text-anchor=\"middle\" transform=\"rotate(-90 30 240)\">z1 (-1 to 1)</text>\n";
  out += "<text x=\"260\" y=\"485\" text-anchor=\"middle\">hue = heading of the final displacement</text>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace skillmpc
