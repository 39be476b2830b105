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

#include <string>
#include <string_view>

namespace ral {

struct Rect {
  int row = 0;
  int col = 0;
  int height = 0;
  int width = 0;

  int area() const noexcept { return height * width; }
  bool contains(int r, int c) const noexcept {
    return r >= row && r < row + height && c >= col && c < col + width;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Rectangular K-way partition of an image. Regions are indexed row-major;
/// when a dimension does not divide evenly, the last row/column of regions
/// absorbs the remainder.
class RegionGrid {
 public:
  RegionGrid(int image_height, int image_width, int rows, int cols);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  int count() const noexcept { return rows_ * cols_; }
  int image_height() const noexcept { return image_height_; }
  int image_width() const noexcept { return image_width_; }

  Rect bounds(int index) const;
  int region_of(int r, int c) const;

  friend bool operator==(const RegionGrid&, const RegionGrid&) = default;

 private:
  int image_height_;
  int image_width_;
  int rows_;
  int cols_;
  int cell_height_;
  int cell_width_;
};

/// k must be a perfect square; builds a sqrt(k) x sqrt(k) grid.
RegionGrid build_grid(int height, int width, int k);
RegionGrid build_grid(int height, int width, int rows, int cols);

/// Same as region_bounds on the grid; throws InvalidArgument out of range.
Rect region_bounds(const RegionGrid& grid, int index);

enum class RegionState { Unlabeled, PointLabeled, BackgroundTagged, PixelLabeled };

std::string_view to_string(RegionState s);
RegionState region_state_from_string(std::string_view s);

inline bool is_labeled(RegionState s) noexcept { return s != RegionState::Unlabeled; }

struct RegionRef {
  std::string image_id;
  int region_index = 0;
  RegionState state = RegionState::Unlabeled;

  friend bool operator==(const RegionRef&, const RegionRef&) = default;
};

/// Enforces monotone label-state transitions: Unlabeled -> labeled only.
void transition(RegionState& current, RegionState next);

}  // namespace ral
