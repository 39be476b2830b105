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

#include "ral/data/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ral/data/errors.hpp"

namespace ral {

RegionGrid::RegionGrid(int image_height, int image_width, int rows, int cols)
    : image_height_(image_height), image_width_(image_width), rows_(rows), cols_(cols) {
  if (image_height <= 0 || image_width <= 0) {
    throw InvalidArgument("RegionGrid: image dimensions must be positive");
  }
  if (rows < 1 || cols < 1) {
    throw InvalidArgument("RegionGrid: region count must be at least 1");
  }
  if (rows > image_height || cols > image_width) {
    throw InvalidArgument("RegionGrid: " + std::to_string(rows) + "x" + std::to_string(cols) +
                          " regions do not fit a " + std::to_string(image_height) + "x" +
                          std::to_string(image_width) + " image");
  }
  cell_height_ = image_height / rows;
  cell_width_ = image_width / cols;
}

Rect RegionGrid::bounds(int index) const {
  if (index < 0 || index >= count()) {
    throw InvalidArgument("region index " + std::to_string(index) + " out of range [0, " +
                          std::to_string(count()) + ")");
  }
  const int gr = index / cols_;
  const int gc = index % cols_;
  Rect rect{gr * cell_height_, gc * cell_width_, cell_height_, cell_width_};
  if (gr == rows_ - 1) {
    rect.height = image_height_ - rect.row;
  }
  if (gc == cols_ - 1) {
    rect.width = image_width_ - rect.col;
  }
  return rect;
}

int RegionGrid::region_of(int r, int c) const {
  if (r < 0 || r >= image_height_ || c < 0 || c >= image_width_) {
    throw InvalidArgument("pixel outside image");
  }
  const int gr = std::min(r / cell_height_, rows_ - 1);
  const int gc = std::min(c / cell_width_, cols_ - 1);
  return gr * cols_ + gc;
}

RegionGrid build_grid(int height, int width, int k) {
  if (k < 1) {
    throw InvalidArgument("build_grid: k must be >= 1");
  }
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(k))));
  if (side * side != k) {
    throw InvalidArgument("build_grid: k = " + std::to_string(k) +
                          " is not a perfect square; pass an explicit (rows, cols) shape");
  }
  return build_grid(height, width, side, side);
}

RegionGrid build_grid(int height, int width, int rows, int cols) {
  if (static_cast<long long>(rows) * cols > static_cast<long long>(height) * width) {
    throw InvalidArgument("build_grid: more regions than pixels");
  }
  return RegionGrid(height, width, rows, cols);
}

Rect region_bounds(const RegionGrid& grid, int index) { return grid.bounds(index); }

std::string_view to_string(RegionState s) {
  switch (s) {
    case RegionState::Unlabeled:
      return "Unlabeled";
    case RegionState::PointLabeled:
      return "PointLabeled";
    case RegionState::BackgroundTagged:
      return "BackgroundTagged";
    case RegionState::PixelLabeled:
      return "PixelLabeled";
  }
  return "Unlabeled";
}

RegionState region_state_from_string(std::string_view s) {
  for (auto st : {RegionState::Unlabeled, RegionState::PointLabeled, RegionState::BackgroundTagged,
                  RegionState::PixelLabeled}) {
    if (to_string(st) == s) {
      return st;
    }
  }
  throw InvalidArgument("unknown region state: " + std::string(s));
}

void transition(RegionState& current, RegionState next) {
  if (is_labeled(current)) {
    throw InvalidState("region already labeled (" + std::string(to_string(current)) + ")");
  }
  if (!is_labeled(next)) {
    throw InvalidState("cannot transition a region back to Unlabeled");
  }
  current = next;
}

}  // namespace ral
