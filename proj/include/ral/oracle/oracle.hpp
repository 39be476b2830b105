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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ral/data/grid.hpp"
#include "ral/data/image.hpp"
#include "ral/oracle/components.hpp"
#include "ral/oracle/polygon.hpp"

namespace ral::oracle {

enum class ActionKind { PointLabel, BackgroundTag, RegionPixelLabel, FullSlicePixelLabel };

std::string_view to_string(ActionKind k);
ActionKind action_kind_from_string(std::string_view s);

/// One priced annotation step. Costs are integer milliseconds.
struct AnnotationAction {
  ActionKind kind = ActionKind::PointLabel;
  std::string image_id;
  int region_index = -1;          // -1 for whole-slice actions
  std::vector<Pixel> points;      // the click for PointLabel
  int vertices = 0;               // polygon vertices charged by pixel labels
  std::int64_t cost_ms = 0;
  int cycle = 0;
  std::int64_t timestamp_ms = 0;

  friend bool operator==(const AnnotationAction&, const AnnotationAction&) = default;
};

enum class FullLabelCost {
  Polygon,     // 3 s per simplified polygon vertex
  ExpertSlice  // whole slices at a flat expert rate
};

struct CostModel {
  std::int64_t click_ms = 3000;
  double polygon_tolerance = kDefaultTolerance;
  FullLabelCost full_label = FullLabelCost::Polygon;
  std::int64_t expert_slice_ms = 96000;
};

/// Pixels written by an annotation and the region's resulting state.
struct LabelDelta {
  std::string image_id;
  int region_index = -1;
  Rect area;
  std::vector<std::pair<Pixel, std::int8_t>> pixels;
  RegionState state = RegionState::Unlabeled;
};

struct Annotation {
  LabelDelta delta;
  std::vector<AnnotationAction> actions;

  std::int64_t cost_ms() const noexcept;
};

/// Simulated point annotator. Infected 8-connected components of the ground
/// truth inside the region each get one uniformly random click (3 s each);
/// a region without infection is tagged background (all pixels 0, 3 s).
/// `seed` fixes the click positions.
Annotation annotate_point(const RegionGrid& grid, const RegionRef& region, const GroundTruthMask& gt,
                          std::uint64_t seed, int cycle, const CostModel& cost = {});

/// Simulated per-pixel annotator for one region: every pixel gets its true
/// class; cost is 3 s per polygon vertex summed over infected components
/// clipped to the region, or 3 s for a background-only region.
Annotation annotate_full(const RegionGrid& grid, const RegionRef& region, const GroundTruthMask& gt, int cycle,
                         const CostModel& cost = {});

/// Whole-slice per-pixel labeling. Priced at the expert rate under
/// FullLabelCost::ExpertSlice, otherwise by polygon vertices over the slice.
Annotation annotate_full_slice(const GroundTruthMask& gt, int cycle, const CostModel& cost = {});

/// Human clicks on infected pixels of a region (one action per click).
/// Throws InvalidArgument when a point lies outside the region.
Annotation manual_points(const RegionGrid& grid, const RegionRef& region, std::span<const Pixel> points, int cycle,
                         const CostModel& cost = {});

/// Human background tag for a region.
Annotation manual_background(const RegionGrid& grid, const RegionRef& region, int cycle, const CostModel& cost = {});

/// Writes the delta into the label mask and moves the region state forward.
/// Throws InvalidState if the region was already labeled.
void apply(const LabelDelta& delta, PartialLabelMask& labels, RegionState& state);

/// initial_images * regions_per_image * click + cycles * regions_per_cycle * click.
std::int64_t scenario_cost_ms(std::int64_t initial_images, std::int64_t regions_per_image, std::int64_t cycles,
                              std::int64_t regions_per_cycle, std::int64_t ms_per_point);
double scenario_cost(std::int64_t initial_images, std::int64_t regions_per_image, std::int64_t cycles,
                     std::int64_t regions_per_cycle, double seconds_per_point);

}  // namespace ral::oracle
