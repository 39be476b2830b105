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

#include "ral/oracle/polygon.hpp"

#include <algorithm>
#include <cmath>

#include "ral/data/errors.hpp"
#include "ral/oracle/components.hpp"

namespace ral::oracle {

namespace {

// East, south, west, north in screen coordinates (y grows downward).
constexpr int kDx[4] = {1, 0, -1, 0};
constexpr int kDy[4] = {0, 1, 0, -1};

bool fg(const Array2D<std::uint8_t>& m, int r, int c) {
  return r >= 0 && c >= 0 && r < m.rows() && c < m.cols() && m(r, c) != 0;
}

// True when the unit edge leaving (x, y) in direction d has foreground on
// its right and background on its left.
bool boundary_edge(const Array2D<std::uint8_t>& m, int x, int y, int d) {
  switch (d) {
    case 0: return fg(m, y, x) && !fg(m, y - 1, x);
    case 1: return fg(m, y, x - 1) && !fg(m, y, x);
    case 2: return fg(m, y - 1, x - 1) && !fg(m, y, x - 1);
    default: return fg(m, y - 1, x) && !fg(m, y - 1, x - 1);
  }
}

double segment_distance(const LatticePoint& p, const LatticePoint& a, const LatticePoint& b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double wx = p.x - a.x, wy = p.y - a.y;
  const double len2 = vx * vx + vy * vy;
  if (len2 == 0.0) return std::hypot(wx, wy);
  const double t = std::clamp((wx * vx + wy * vy) / len2, 0.0, 1.0);
  return std::hypot(wx - t * vx, wy - t * vy);
}

void rdp(const std::vector<LatticePoint>& pts, std::size_t first, std::size_t last, double eps,
         std::vector<bool>& keep) {
  if (last <= first + 1) return;
  double best = -1.0;
  std::size_t idx = first;
  for (std::size_t i = first + 1; i < last; ++i) {
    const double d = segment_distance(pts[i], pts[first], pts[last]);
    if (d > best) {
      best = d;
      idx = i;
    }
  }
  if (best > eps) {
    keep[idx] = true;
    rdp(pts, first, idx, eps, keep);
    rdp(pts, idx, last, eps, keep);
  }
}

}  // namespace

std::vector<LatticePoint> trace_outer_boundary(const Array2D<std::uint8_t>& mask) {
  int start_r = -1, start_c = -1;
  for (int r = 0; r < mask.rows() && start_r < 0; ++r) {
    for (int c = 0; c < mask.cols(); ++c) {
      if (mask(r, c) != 0) {
        start_r = r;
        start_c = c;
        break;
      }
    }
  }
  if (start_r < 0) throw InvalidArgument("polygon: empty component");

  std::vector<LatticePoint> ring;
  int x = start_c, y = start_r, d = 0;
  const int sx = x, sy = y;
  do {
    // Left turn first keeps diagonal neighbours inside one outline.
    int next = -1;
    for (int turn : {3, 0, 1}) {
      const int cand = (d + turn) % 4;
      if (boundary_edge(mask, x, y, cand)) {
        next = cand;
        break;
      }
    }
    if (next < 0) throw InvalidState("polygon: boundary walk lost the contour");
    if (next != d || ring.empty()) ring.push_back({x, y});
    d = next;
    x += kDx[d];
    y += kDy[d];
  } while (!(x == sx && y == sy && d == 3));
  // The walk re-enters the start corner heading north; the first push
  // recorded it already with the initial east heading.
  return ring;
}

std::vector<LatticePoint> simplify_closed(const std::vector<LatticePoint>& ring, double epsilon) {
  const std::size_t n = ring.size();
  if (n < 3) return ring;
  std::size_t far = 0;
  double far_d = -1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = std::hypot(ring[i].x - ring[0].x, ring[i].y - ring[0].y);
    if (d > far_d) {
      far_d = d;
      far = i;
    }
  }
  // Unroll the ring so both chains are contiguous: 0..far and far..n.
  std::vector<LatticePoint> pts(ring);
  pts.push_back(ring[0]);
  std::vector<bool> keep(pts.size(), false);
  keep[0] = keep[far] = keep[n] = true;
  rdp(pts, 0, far, epsilon, keep);
  rdp(pts, far, n, epsilon, keep);
  std::vector<LatticePoint> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) out.push_back(pts[i]);
  }
  return out;
}

int polygon_vertex_count(const Array2D<std::uint8_t>& component, double epsilon) {
  if (!(epsilon >= 0.0)) throw InvalidArgument("polygon: tolerance must be >= 0");
  const auto comps = connected_components(component);
  if (comps.empty()) throw InvalidArgument("polygon: empty component");
  if (comps.size() > 1) throw InvalidArgument("polygon: mask is not a single 8-connected component");
  const auto simplified = simplify_closed(trace_outer_boundary(component), epsilon);
  if (simplified.size() < 3) return 4;
  return std::max<int>(3, static_cast<int>(simplified.size()));
}

}  // namespace ral::oracle
