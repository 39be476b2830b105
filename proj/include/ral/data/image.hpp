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
#include <string>

#include "ral/data/array.hpp"

namespace ral {

inline constexpr int kBackground = 0;
inline constexpr int kInfected = 1;
inline constexpr std::int8_t kUnlabeled = -1;

/// A preprocessed 2D slice. Pixels hold normalized intensities.
struct ImageSlice {
  std::string id;
  std::string scan_id;
  int slice_index = 0;
  Array2D<double> pixels;

  int height() const noexcept { return pixels.rows(); }
  int width() const noexcept { return pixels.cols(); }
};

/// Full per-pixel class mask; values are 0 (background) or 1 (infected).
struct GroundTruthMask {
  std::string image_id;
  Array2D<std::uint8_t> classes;
};

/// Tri-state supervision: -1 unlabeled, 0 background, 1 infected.
struct PartialLabelMask {
  std::string image_id;
  Array2D<std::int8_t> labels;

  static PartialLabelMask unlabeled(std::string image_id, int height, int width) {
    return {std::move(image_id), Array2D<std::int8_t>(height, width, kUnlabeled)};
  }
  static PartialLabelMask from_ground_truth(const GroundTruthMask& gt);

  std::size_t labeled_count() const;
};

/// Throws InvalidArgument unless every value is 0 or 1.
void validate_binary(const Array2D<std::uint8_t>& mask);

/// Throws InvalidArgument unless every value is in {-1, 0, 1}.
void validate_tristate(const Array2D<std::int8_t>& labels);

}  // namespace ral
