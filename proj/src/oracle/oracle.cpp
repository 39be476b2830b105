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

#include "ral/oracle/oracle.hpp"

#include <cmath>
#include <random>

#include "ral/data/errors.hpp"
#include "ral/data/seed.hpp"

namespace ral::oracle {

std::string_view to_string(ActionKind k) {
  switch (k) {
    case ActionKind::PointLabel: return "point_label";
    case ActionKind::BackgroundTag: return "background_tag";
    case ActionKind::RegionPixelLabel: return "region_pixel_label";
    case ActionKind::FullSlicePixelLabel: return "full_slice_pixel_label";
  }
  return "unknown";
}

ActionKind action_kind_from_string(std::string_view s) {
  for (auto k : {ActionKind::PointLabel, ActionKind::BackgroundTag, ActionKind::RegionPixelLabel,
                 ActionKind::FullSlicePixelLabel}) {
    if (to_string(k) == s) return k;
  }
  throw InvalidArgument("unknown action kind '" + std::string(s) + "'");
}

std::int64_t Annotation::cost_ms() const noexcept {
  std::int64_t total = 0;
  for (const auto& a : actions) total += a.cost_ms;
  return total;
}

namespace {

void require_unlabeled(const RegionRef& region) {
  if (region.state != RegionState::Unlabeled) {
    throw InvalidState("region " + std::to_string(region.region_index) + " of " + region.image_id +
                       " is already labeled (" + std::string(to_string(region.state)) + ")");
  }
}

void require_shape(const RegionGrid& grid, const GroundTruthMask& gt) {
  if (gt.classes.rows() != grid.image_height() || gt.classes.cols() != grid.image_width()) {
    throw InvalidArgument("oracle: ground truth " + gt.image_id + " does not match the grid");
  }
}

LabelDelta empty_delta(const RegionGrid& grid, const RegionRef& region) {
  return {region.image_id, region.region_index, grid.bounds(region.region_index), {}, RegionState::Unlabeled};
}

AnnotationAction action(ActionKind kind, const RegionRef& region, std::int64_t cost_ms, int cycle) {
  AnnotationAction a;
  a.kind = kind;
  a.image_id = region.image_id;
  a.region_index = region.region_index;
  a.cost_ms = cost_ms;
  a.cycle = cycle;
  return a;
}

void fill(LabelDelta& delta, std::int8_t value) {
  const Rect& b = delta.area;
  for (int r = b.row; r < b.row + b.height; ++r) {
    for (int c = b.col; c < b.col + b.width; ++c) delta.pixels.push_back({{r, c}, value});
  }
}

// Polygon vertices over the infected components of gt inside `area`.
int polygon_vertices(const GroundTruthMask& gt, const Rect& area, double tolerance, std::vector<int>* per_comp) {
  int total = 0;
  for (const auto& comp : connected_components(gt.classes, area)) {
    const int v = polygon_vertex_count(rasterize(comp).mask, tolerance);
    if (per_comp != nullptr) per_comp->push_back(v);
    total += v;
  }
  return total;
}

}  // namespace

Annotation annotate_point(const RegionGrid& grid, const RegionRef& region, const GroundTruthMask& gt,
                          std::uint64_t seed, int cycle, const CostModel& cost) {
  require_unlabeled(region);
  require_shape(grid, gt);
  Annotation out{empty_delta(grid, region), {}};
  const auto comps = connected_components(gt.classes, out.delta.area);
  if (comps.empty()) {
    fill(out.delta, static_cast<std::int8_t>(kBackground));
    out.delta.state = RegionState::BackgroundTagged;
    out.actions.push_back(action(ActionKind::BackgroundTag, region, cost.click_ms, cycle));
    return out;
  }
  std::mt19937_64 rng(derive_seed(seed, {hash_string(region.image_id.c_str()),
                                         static_cast<std::uint64_t>(region.region_index)}));
  for (const auto& comp : comps) {
    std::uniform_int_distribution<std::size_t> pick(0, comp.size() - 1);
    const Pixel p = comp[pick(rng)];
    out.delta.pixels.push_back({p, static_cast<std::int8_t>(kInfected)});
    auto a = action(ActionKind::PointLabel, region, cost.click_ms, cycle);
    a.points.push_back(p);
    out.actions.push_back(std::move(a));
  }
  out.delta.state = RegionState::PointLabeled;
  return out;
}

Annotation annotate_full(const RegionGrid& grid, const RegionRef& region, const GroundTruthMask& gt, int cycle,
                         const CostModel& cost) {
  require_unlabeled(region);
  require_shape(grid, gt);
  Annotation out{empty_delta(grid, region), {}};
  const Rect& b = out.delta.area;
  for (int r = b.row; r < b.row + b.height; ++r) {
    for (int c = b.col; c < b.col + b.width; ++c) {
      out.delta.pixels.push_back({{r, c}, static_cast<std::int8_t>(gt.classes(r, c))});
    }
  }
  out.delta.state = RegionState::PixelLabeled;
  const int vertices = polygon_vertices(gt, b, cost.polygon_tolerance, nullptr);
  if (vertices == 0) {
    out.actions.push_back(action(ActionKind::BackgroundTag, region, cost.click_ms, cycle));
  } else {
    auto a = action(ActionKind::RegionPixelLabel, region, cost.click_ms * vertices, cycle);
    a.vertices = vertices;
    out.actions.push_back(std::move(a));
  }
  return out;
}

Annotation annotate_full_slice(const GroundTruthMask& gt, int cycle, const CostModel& cost) {
  const Rect whole{0, 0, gt.classes.rows(), gt.classes.cols()};
  Annotation out{{gt.image_id, -1, whole, {}, RegionState::PixelLabeled}, {}};
  for (int r = 0; r < whole.height; ++r) {
    for (int c = 0; c < whole.width; ++c) {
      out.delta.pixels.push_back({{r, c}, static_cast<std::int8_t>(gt.classes(r, c))});
    }
  }
  AnnotationAction a;
  a.kind = ActionKind::FullSlicePixelLabel;
  a.image_id = gt.image_id;
  a.cycle = cycle;
  if (cost.full_label == FullLabelCost::ExpertSlice) {
    a.cost_ms = cost.expert_slice_ms;
  } else {
    a.vertices = polygon_vertices(gt, whole, cost.polygon_tolerance, nullptr);
    a.cost_ms = a.vertices == 0 ? cost.click_ms : cost.click_ms * a.vertices;
  }
  out.actions.push_back(std::move(a));
  return out;
}

Annotation manual_points(const RegionGrid& grid, const RegionRef& region, std::span<const Pixel> points, int cycle,
                         const CostModel& cost) {
  require_unlabeled(region);
  if (points.empty()) throw InvalidArgument("manual_points: at least one point required");
  Annotation out{empty_delta(grid, region), {}};
  for (const auto& p : points) {
    if (!out.delta.area.contains(p.row, p.col)) {
      throw InvalidArgument("point (" + std::to_string(p.row) + ", " + std::to_string(p.col) +
                            ") lies outside region " + std::to_string(region.region_index));
    }
  }
  for (const auto& p : points) {
    out.delta.pixels.push_back({p, static_cast<std::int8_t>(kInfected)});
    auto a = action(ActionKind::PointLabel, region, cost.click_ms, cycle);
    a.points.push_back(p);
    out.actions.push_back(std::move(a));
  }
  out.delta.state = RegionState::PointLabeled;
  return out;
}

Annotation manual_background(const RegionGrid& grid, const RegionRef& region, int cycle, const CostModel& cost) {
  require_unlabeled(region);
  Annotation out{empty_delta(grid, region), {}};
  fill(out.delta, static_cast<std::int8_t>(kBackground));
  out.delta.state = RegionState::BackgroundTagged;
  out.actions.push_back(action(ActionKind::BackgroundTag, region, cost.click_ms, cycle));
  return out;
}

void apply(const LabelDelta& delta, PartialLabelMask& labels, RegionState& state) {
  transition(state, delta.state);
  for (const auto& [p, v] : delta.pixels) {
    if (p.row < 0 || p.col < 0 || p.row >= labels.labels.rows() || p.col >= labels.labels.cols()) {
      throw InvalidArgument("apply: pixel outside the label mask");
    }
    labels.labels(p.row, p.col) = v;
  }
}

std::int64_t scenario_cost_ms(std::int64_t initial_images, std::int64_t regions_per_image, std::int64_t cycles,
                              std::int64_t regions_per_cycle, std::int64_t ms_per_point) {
  if (initial_images < 0 || regions_per_image < 0 || cycles < 0 || regions_per_cycle < 0 || ms_per_point < 0) {
    throw InvalidArgument("scenario_cost: arguments must be non-negative");
  }
  return initial_images * ms_per_point * regions_per_image + cycles * regions_per_cycle * ms_per_point;
}

double scenario_cost(std::int64_t initial_images, std::int64_t regions_per_image, std::int64_t cycles,
                     std::int64_t regions_per_cycle, double seconds_per_point) {
  const auto ms = static_cast<std::int64_t>(std::llround(seconds_per_point * 1000.0));
  return static_cast<double>(scenario_cost_ms(initial_images, regions_per_image, cycles, regions_per_cycle, ms)) /
         1000.0;
}

}  // namespace ral::oracle
