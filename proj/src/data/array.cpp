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

#include "ral/data/array.hpp"

#include <algorithm>

#include "ral/data/image.hpp"

namespace ral {

ProbMap::ProbMap(int height, int width, int classes, double fill)
    : height_(height), width_(width), classes_(classes) {
  if (height < 0 || width < 0 || classes < 1) {
    throw InvalidArgument("ProbMap: invalid shape");
  }
  values_.assign(pixel_count() * classes, fill);
}

ProbMap::ProbMap(int height, int width, int classes, std::vector<double> values)
    : height_(height), width_(width), classes_(classes), values_(std::move(values)) {
  if (height < 0 || width < 0 || classes < 1 || values_.size() != pixel_count() * classes) {
    throw InvalidArgument("ProbMap: value count does not match shape");
  }
}

Array2D<std::uint8_t> argmax_mask(const ProbMap& probs) {
  Array2D<std::uint8_t> out(probs.height(), probs.width());
  for (int r = 0; r < probs.height(); ++r) {
    for (int c = 0; c < probs.width(); ++c) {
      auto px = probs.pixel(r, c);
      // First maximum wins, so an exact tie resolves to background.
      out(r, c) = static_cast<std::uint8_t>(std::max_element(px.begin(), px.end()) - px.begin());
    }
  }
  return out;
}

PartialLabelMask PartialLabelMask::from_ground_truth(const GroundTruthMask& gt) {
  validate_binary(gt.classes);
  Array2D<std::int8_t> labels(gt.classes.rows(), gt.classes.cols());
  auto src = gt.classes.values();
  auto dst = labels.values();
  std::transform(src.begin(), src.end(), dst.begin(), [](std::uint8_t v) { return static_cast<std::int8_t>(v); });
  return {gt.image_id, std::move(labels)};
}

std::size_t PartialLabelMask::labeled_count() const {
  auto v = labels.values();
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](std::int8_t x) { return x != kUnlabeled; }));
}

void validate_binary(const Array2D<std::uint8_t>& mask) {
  for (auto v : mask.values()) {
    if (v > 1) {
      throw InvalidArgument("mask values must be 0 or 1");
    }
  }
}

void validate_tristate(const Array2D<std::int8_t>& labels) {
  for (auto v : labels.values()) {
    if (v < -1 || v > 1) {
      throw InvalidArgument("label values must be in {-1, 0, 1}");
    }
  }
}

}  // namespace ral
