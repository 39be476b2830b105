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
#include <vector>

#include "ral/data/array.hpp"
#include "ral/data/grid.hpp"

namespace ral::oracle {

struct Pixel {
  int row = 0;
  int col = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// 8-connected components of the nonzero pixels of `mask` inside `window`.
/// Components are ordered by their first pixel in raster order; pixels
/// within a component are in raster order.
std::vector<std::vector<Pixel>> connected_components(const Array2D<std::uint8_t>& mask, const Rect& window);
std::vector<std::vector<Pixel>> connected_components(const Array2D<std::uint8_t>& mask);

/// Tight binary raster of one component, plus its offset in the source.
struct ComponentRaster {
  Array2D<std::uint8_t> mask;
  int row0 = 0;
  int col0 = 0;
};
ComponentRaster rasterize(const std::vector<Pixel>& component);

}  // namespace ral::oracle
