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

#include "ral/orchestrate/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <tuple>

#include "ral/data/errors.hpp"

namespace ral::orchestrate {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_csv(const std::filesystem::path& path, const std::string& header, const std::vector<std::string>& rows) {
  std::filesystem::create_directories(path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("cannot write " + path.string());
  out << header << '\n';
  for (const auto& r : rows) out << r << '\n';
}

void require_seeds(std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw InvalidArgument("experiment needs at least one seed");
}

RunConfig variant(const RunConfig& base, const std::string& run_id, std::uint64_t seed) {
  RunConfig c = base;
  c.run_id = run_id;
  c.seed = seed;
  return c;
}

double final_dice(const RunResult& r) { return r.curve.empty() ? 0.0 : r.curve.back().dice; }

}  // namespace

std::string experiment_prefix(const RunConfig& base, const std::string& experiment) {
  return base.run_id.empty() ? experiment : base.run_id;
}

int HeuristicsReport::entropy_auc_wins() const noexcept {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.delta_auc() > 0; }));
}

double HeuristicsReport::mean_final_dice_delta() const noexcept {
  if (rows.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : rows) s += r.delta_final_dice();
  return s / static_cast<double>(rows.size());
}

HeuristicsReport experiment_heuristics(const RunConfig& base, std::span<const std::uint64_t> seeds,
                                       const RunOptions& options) {
  require_seeds(seeds);
  base.validate();
  const auto prefix = experiment_prefix(base, "heuristics");
  HeuristicsReport report;
  std::vector<std::string> lines;
  for (auto seed : seeds) {
    HeuristicsRow row;
    row.seed = seed;
    for (auto h : {acquisition::Heuristic::Random, acquisition::Heuristic::Entropy}) {
      RunConfig c = variant(base, prefix + "-" + std::string(acquisition::to_string(h)) + "-s" + std::to_string(seed),
                            seed);
      c.heuristic = h;
      auto r = run(c, options);
      const double auc = eval::curve_auc(r.curve);
      if (h == acquisition::Heuristic::Random) {
        row.auc_random = auc;
        row.final_dice_random = final_dice(r);
      } else {
        row.auc_entropy = auc;
        row.final_dice_entropy = final_dice(r);
      }
      report.runs.push_back(std::move(r));
    }
    report.rows.push_back(row);
    lines.push_back(std::to_string(seed) + "," + num(row.auc_random) + "," + num(row.auc_entropy) + "," +
                    num(row.delta_auc()) + "," + num(row.final_dice_random) + "," + num(row.final_dice_entropy) +
                    "," + num(row.delta_final_dice()));
  }
  report.summary_csv = base.output_dir / (prefix + "_heuristics_summary.csv");
  write_csv(report.summary_csv, kHeuristicsHeader, lines);
  return report;
}

int seed_images_for_budget(double budget_seconds, int k, std::int64_t click_ms) {
  if (budget_seconds < 0 || k < 1 || click_ms < 1) throw InvalidArgument("seed_images_for_budget: bad arguments");
  const auto budget_ms = static_cast<std::int64_t>(std::llround(budget_seconds * 1000.0));
  return static_cast<int>(budget_ms / (static_cast<std::int64_t>(k) * click_ms));
}

RegionSizeReport experiment_region_size(const RunConfig& base, std::span<const std::uint64_t> seeds,
                                        const RunOptions& options) {
  require_seeds(seeds);
  base.validate();
  if (!base.experiments.seed_budget_seconds) {
    throw InvalidArgument("config: experiments.seed_budget_seconds is required for the region-size study");
  }
  if (base.experiments.region_sizes.empty()) throw InvalidArgument("config: experiments.region_sizes is empty");
  const auto prefix = experiment_prefix(base, "region-size");
  const double budget = *base.experiments.seed_budget_seconds;

  std::vector<RunConfig> configs;
  for (auto seed : seeds) {
    for (int k : base.experiments.region_sizes) {
      RunConfig c = variant(base, prefix + "-k" + std::to_string(k) + "-s" + std::to_string(seed), seed);
      c.regions_per_image = k;
      const int n = seed_images_for_budget(budget, k, c.cost.click_ms);
      if (n < 1) {
        throw InvalidArgument("config: seed budget " + num(budget) + " s buys no whole image at k=" +
                              std::to_string(k));
      }
      c.seed_images = n;
      prepare_workspace(c);  // reject incompatible k before any run starts
      configs.push_back(std::move(c));
    }
  }

  RegionSizeReport report;
  std::vector<std::string> lines;
  for (const auto& c : configs) {
    auto r = run(c, options);
    RegionSizeRow row{c.seed,
                      c.regions_per_image,
                      c.seed_image_count(),
                      r.curve.back().regions_labeled,
                      r.curve.back().cost_seconds(),
                      final_dice(r),
                      eval::curve_auc(r.curve)};
    report.rows.push_back(row);
    lines.push_back(std::to_string(row.seed) + "," + std::to_string(row.k) + "," + std::to_string(row.seed_images) +
                    "," + std::to_string(row.regions_labeled) + "," + num(row.final_cost_seconds) + "," +
                    num(row.final_dice) + "," + num(row.auc));
    report.runs.push_back(std::move(r));
  }
  report.summary_csv = base.output_dir / (prefix + "_region_size_summary.csv");
  write_csv(report.summary_csv, kRegionSizeHeader, lines);
  return report;
}

CheckpointComparison compare_on_cost(const std::vector<eval::CurvePoint>& point,
                                     const std::vector<eval::CurvePoint>& pixel, double fraction) {
  CheckpointComparison out;
  if (point.empty() || pixel.empty()) return out;
  const std::int64_t lo = std::max(point.front().cost_ms, pixel.front().cost_ms);
  // Both curves must have reached a checkpoint, and it must lie within
  // `fraction` of the cost axis the pair spans.
  const auto budget = std::max(point.back().cost_ms, pixel.back().cost_ms);
  const auto hi = std::min(std::min(point.back().cost_ms, pixel.back().cost_ms),
                           static_cast<std::int64_t>(std::floor(fraction * static_cast<double>(budget))));
  std::set<std::int64_t> costs;
  for (const auto* curve : {&point, &pixel}) {
    for (const auto& p : *curve) {
      if (p.cost_ms >= lo && p.cost_ms <= hi) costs.insert(p.cost_ms);
    }
  }
  for (auto c : costs) {
    const auto a = eval::dice_at_cost(point, c);
    const auto b = eval::dice_at_cost(pixel, c);
    out.checkpoints_ms.push_back(c);
    if (*a >= *b) ++out.point_wins;
  }
  return out;
}

int SupervisionReport::seeds_point_dominates() const noexcept {
  return static_cast<int>(
      std::count_if(comparisons.begin(), comparisons.end(), [](const auto& c) { return c.point_dominates(); }));
}

SupervisionReport experiment_supervision(const RunConfig& base, std::span<const std::uint64_t> seeds,
                                         const RunOptions& options) {
  require_seeds(seeds);
  base.validate();
  if (base.cost.full_label != oracle::FullLabelCost::Polygon) {
    throw InvalidArgument("config: the supervision study needs polygon-vertex pricing for per-pixel labels");
  }
  const auto prefix = experiment_prefix(base, "supervision");
  SupervisionReport report;
  std::vector<std::string> check_lines;
  for (auto seed : seeds) {
    std::vector<eval::CurvePoint> curves[2];
    int i = 0;
    for (auto s : {Supervision::PointLevel, Supervision::PerPixel}) {
      RunConfig c = variant(base, prefix + "-" + std::string(to_string(s)) + "-s" + std::to_string(seed), seed);
      c.supervision = s;
      auto r = run(c, options);
      for (const auto& p : r.curve) {
        report.rows.push_back({p.cost_seconds(), std::string(to_string(s)), seed, p.cycle, p.regions_labeled, p.dice});
      }
      curves[i++] = r.curve;
      report.runs.push_back(std::move(r));
    }
    const auto cmp = compare_on_cost(curves[0], curves[1]);
    check_lines.push_back(std::to_string(seed) + "," + std::to_string(cmp.checkpoints_ms.size()) + "," +
                          std::to_string(cmp.point_wins) + "," + (cmp.point_dominates() ? "true" : "false"));
    report.comparisons.push_back(cmp);
  }
  std::stable_sort(report.rows.begin(), report.rows.end(), [](const auto& a, const auto& b) {
    return std::tie(a.cost_seconds, a.scheme, a.seed, a.cycle) < std::tie(b.cost_seconds, b.scheme, b.seed, b.cycle);
  });
  std::vector<std::string> lines;
  for (const auto& r : report.rows) {
    lines.push_back(num(r.cost_seconds) + "," + r.scheme + "," + std::to_string(r.seed) + "," +
                    std::to_string(r.cycle) + "," + std::to_string(r.regions_labeled) + "," + num(r.dice));
  }
  report.comparison_csv = base.output_dir / (prefix + "_supervision_comparison.csv");
  report.checkpoint_csv = base.output_dir / (prefix + "_supervision_checkpoints.csv");
  write_csv(report.comparison_csv, kSupervisionHeader, lines);
  write_csv(report.checkpoint_csv, "seed,checkpoints,point_wins,point_dominates", check_lines);
  return report;
}

}  // namespace ral::orchestrate
