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

#include "ral/data/array.hpp"
#include "ral/data/image.hpp"

namespace ral::ingest {

/// Everything needed to reproduce slice intensities from raw HU values.
/// Recorded verbatim in the dataset manifest.
struct Preprocessing {
  double hu_low = -1000.0;
  double hu_high = 400.0;
  int target_height = 352;
  int target_width = 352;
  double mean = 0.485;
  double std = 0.229;

  void validate() const;
  friend bool operator==(const Preprocessing&, const Preprocessing&) = default;
};

/// Clip to the HU window and map linearly onto [0, 255], rounding to the
/// nearest integer.
Array2D<std::uint8_t> window_to_u8(const Array2D<std::int32_t>& raw_hu, double low, double high);

/// Bilinear resampling with half-pixel centers (edges clamped).
Array2D<double> resize_bilinear(const Array2D<double>& src, int height, int width);

/// (x / 255 - mean) / std, elementwise.
Array2D<double> normalize(const Array2D<double>& u8_values, double mean, double std);

/// Inverse of normalize followed by rounding and clamping to [0, 255].
Array2D<std::uint8_t> denormalize_to_u8(const Array2D<double>& pixels, double mean, double std);

/// Full pipeline: window -> uint8 -> resize -> normalize.
Array2D<double> preprocess_slice(const Array2D<std::int32_t>& raw_hu, const Preprocessing& prep = {});

/// Nearest-neighbour resampling; the output stays binary.
GroundTruthMask resize_mask(const GroundTruthMask& mask, int height, int width);

}  // namespace ral::ingest
