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

#include "ral/eval/curves.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ral/data/errors.hpp"

namespace ral::eval {

std::string format_curve_row(const CurvePoint& p) {
  char buf[256];
  char spec[32] = "nan";
  if (p.specificity) std::snprintf(spec, sizeof(spec), "%.6f", *p.specificity);
  std::snprintf(buf, sizeof(buf), "%d,%lld.%03lld,%d,%.6f,%s,", p.cycle, static_cast<long long>(p.cost_ms / 1000),
                static_cast<long long>(p.cost_ms % 1000), p.regions_labeled, p.dice, spec);
  return std::string(buf) + p.heuristic + "," + p.aggregation + "," + std::to_string(p.seed);
}

std::string format_curve_csv(const std::vector<CurvePoint>& rows) {
  std::string out = std::string(kCurveHeader) + "\n";
  for (const auto& r : rows) out += format_curve_row(r) + "\n";
  return out;
}

void write_curve_csv(const std::filesystem::path& path, const std::vector<CurvePoint>& rows) {
  std::ofstream out(path, std::ios::binary);
  out << format_curve_csv(rows);
  if (!out) throw LoadError("failed to write curve " + path.string());
}

std::vector<CurvePoint> read_curve_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("curve not found: " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != kCurveHeader) throw LoadError("unexpected curve header in " + path.string());
  std::vector<CurvePoint> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> f;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 8) throw LoadError("malformed curve row in " + path.string() + ": " + line);
    CurvePoint p;
    p.cycle = std::stoi(f[0]);
    p.cost_ms = std::llround(std::stod(f[1]) * 1000.0);
    p.regions_labeled = std::stoi(f[2]);
    p.dice = std::stod(f[3]);
    if (f[4] != "nan") p.specificity = std::stod(f[4]);
    p.heuristic = f[5];
    p.aggregation = f[6];
    p.seed = std::stoull(f[7]);
    rows.push_back(std::move(p));
  }
  return rows;
}

double trapezoid_auc(const std::vector<std::pair<double, double>>& points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto& [x0, y0] = points[i - 1];
    const auto& [x1, y1] = points[i];
    if (x1 < x0) throw InvalidArgument("trapezoid_auc: x must be non-decreasing");
    area += (x1 - x0) * (y0 + y1) / 2.0;
  }
  return area;
}

double curve_auc(const std::vector<CurvePoint>& rows) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(rows.size());
  for (const auto& r : rows) pts.emplace_back(static_cast<double>(r.regions_labeled), r.dice);
  return trapezoid_auc(pts);
}

std::optional<double> dice_at_cost(const std::vector<CurvePoint>& rows, std::int64_t cost_ms) {
  std::optional<double> value;
  for (const auto& r : rows) {
    if (r.cost_ms > cost_ms) break;
    value = r.dice;
  }
  return value;
}

}  // namespace ral::eval
