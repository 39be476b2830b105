// Copyright 2026 The RAL Authors. All Rights Reserved.
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ral::eval {

/// One row of a cost-vs-score learning curve.
struct CurvePoint {
  int cycle = 0;
  std::int64_t cost_ms = 0;
  int regions_labeled = 0;
  double dice = 0.0;
  std::optional<double> specificity;  // empty when undefined on the split
  std::string heuristic;
  std::string aggregation;
  std::uint64_t seed = 0;

  double cost_seconds() const noexcept { return static_cast<double>(cost_ms) / 1000.0; }
};

inline constexpr const char* kCurveHeader =
    "cycle,cost_seconds,regions_labeled,dice,specificity,heuristic,aggregation,seed";

std::string format_curve_row(const CurvePoint& p);
std::string format_curve_csv(const std::vector<CurvePoint>& rows);
void write_curve_csv(const std::filesystem::path& path, const std::vector<CurvePoint>& rows);
std::vector<CurvePoint> read_curve_csv(const std::filesystem::path& path);

/// Trapezoidal area under a piecewise-linear curve given as (x, y) points
/// with non-decreasing x.
double trapezoid_auc(const std::vector<std::pair<double, double>>& points);

/// Dice vs regions labeled.
double curve_auc(const std::vector<CurvePoint>& rows);

/// Value of a step curve at `cost_ms`: dice of the last row whose cost does
/// not exceed it, or empty when the curve starts later.
std::optional<double> dice_at_cost(const std::vector<CurvePoint>& rows, std::int64_t cost_ms);

}  // namespace ral::eval
