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

#ifndef SKILLMPC_REPORT_H_
#define SKILLMPC_REPORT_H_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "skillmpc/env.h"

namespace skillmpc {

// Shortest decimal form that parses back to the same double.
std::string FormatNumber(double x);

// Minimal CSV table with a fixed column order.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  void AddRow(const std::vector<std::string>& cells);
  void AddRow(const std::vector<double>& values);
  std::string ToString() const;
  int rows() const { return static_cast<int>(rows_.size()); }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

// traces.csv rows: episode, step, skill components, state components,
// action components, reward.
CsvTable TraceTable(const std::vector<Trajectory>& episodes,
                    const std::vector<std::vector<double>>* rewards = nullptr);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Line plot with auto-scaled axes. Set equal_axes for x-y traces.
std::string SvgLinePlot(const std::vector<Series>& series,
                        const std::string& title, const std::string& x_label,
                        const std::string& y_label, bool equal_axes = false,
                        const std::vector<Eigen::Vector2d>& markers = {});

// resolution x resolution heatmap of angles in radians (NaN cells grey),
// rendered on a cyclic color wheel. Row i is drawn as the i-th column.
std::string SvgHeadingMap(const std::vector<double>& headings, int resolution,
                          const std::string& title);

}  // namespace skillmpc

#endif  // SKILLMPC_REPORT_H_
