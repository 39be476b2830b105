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

#include "ral/oracle/components.hpp"

#include <algorithm>
#include <climits>

#include "ral/data/errors.hpp"

namespace ral::oracle {

std::vector<std::vector<Pixel>> connected_components(const Array2D<std::uint8_t>& mask, const Rect& w) {
  if (w.row < 0 || w.col < 0 || w.row + w.height > mask.rows() || w.col + w.width > mask.cols()) {
    throw InvalidArgument("connected_components: window outside the mask");
  }
  Array2D<int> label(w.height, w.width, -1);
  std::vector<std::vector<Pixel>> out;
  std::vector<Pixel> stack;
  for (int r = 0; r < w.height; ++r) {
    for (int c = 0; c < w.width; ++c) {
      if (mask(w.row + r, w.col + c) == 0 || label(r, c) >= 0) continue;
      const int id = static_cast<int>(out.size());
      std::vector<Pixel> comp;
      stack.push_back({r, c});
      label(r, c) = id;
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        comp.push_back({w.row + p.row, w.col + p.col});
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int nr = p.row + dr;
            const int nc = p.col + dc;
            if (nr < 0 || nc < 0 || nr >= w.height || nc >= w.width) continue;
            if (label(nr, nc) >= 0 || mask(w.row + nr, w.col + nc) == 0) continue;
            label(nr, nc) = id;
            stack.push_back({nr, nc});
          }
        }
      }
      std::sort(comp.begin(), comp.end(),
                [](const Pixel& a, const Pixel& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
      out.push_back(std::move(comp));
    }
  }
  return out;
}

std::vector<std::vector<Pixel>> connected_components(const Array2D<std::uint8_t>& mask) {
  return connected_components(mask, Rect{0, 0, mask.rows(), mask.cols()});
}

ComponentRaster rasterize(const std::vector<Pixel>& component) {
  if (component.empty()) throw InvalidArgument("rasterize: empty component");
  int r0 = INT_MAX, c0 = INT_MAX, r1 = INT_MIN, c1 = INT_MIN;
  for (const auto& p : component) {
    r0 = std::min(r0, p.row);
    c0 = std::min(c0, p.col);
    r1 = std::max(r1, p.row);
    c1 = std::max(c1, p.col);
  }
  ComponentRaster out{Array2D<std::uint8_t>(r1 - r0 + 1, c1 - c0 + 1, 0), r0, c0};
  for (const auto& p : component) out.mask(p.row - r0, p.col - c0) = 1;
  return out;
}

}  // namespace ral::oracle
