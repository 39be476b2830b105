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

namespace ral::oracle {

inline constexpr double kDefaultTolerance = 1.0;

/// A point on the pixel-corner lattice: x = column edge, y = row edge.
struct LatticePoint {
  int x = 0;
  int y = 0;
  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
};

/// Outer boundary of the foreground of `mask` as a closed polygon through
/// pixel corners, keeping only the points where the direction changes. The
/// first vertex is the top-left corner of the first foreground pixel in
/// raster order; the walk keeps foreground on its right, so the outline is
/// clockwise on screen. Diagonal contacts are walked through (8-connected).
std::vector<LatticePoint> trace_outer_boundary(const Array2D<std::uint8_t>& mask);

/// Ramer-Douglas-Peucker on a closed polygon: the ring is split at vertex 0
/// and the vertex farthest from it, and both chains are simplified with
/// point-to-segment distances; vertices farther than epsilon survive.
std::vector<LatticePoint> simplify_closed(const std::vector<LatticePoint>& ring, double epsilon);

/// Vertices of the simplified outer polygon of one 8-connected component.
/// A component thinner than epsilon simplifies to a segment; it is then
/// counted as the 4-vertex box drawn around it. Never below 3.
int polygon_vertex_count(const Array2D<std::uint8_t>& component, double epsilon = kDefaultTolerance);

}  // namespace ral::oracle
