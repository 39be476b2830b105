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

#include "ral/data/image.hpp"

namespace ral::ingest {

/// Parameters of the ellipse-on-noise generator. Intensities are expressed
/// as fractions of the 8-bit range before normalization.
struct SyntheticConfig {
  int n_images = 200;
  int height = 64;
  int width = 64;
  double ellipse_density = 2.0;     // expected ellipses per non-background image
  double background_fraction = 0.3; // fraction of images with empty masks
  double radius_min = 3.0;
  double radius_max = 7.0;
  double base_intensity = 0.35;
  double contrast = 0.25;
  double noise = 0.08;
  int distractors = 0;              // bright non-infected blobs per image
  int slices_per_scan = 20;
  std::uint64_t seed = 7;
  double mean = 0.485;
  double std = 0.229;

  void validate() const;
};

struct LabeledSlice {
  ImageSlice image;
  GroundTruthMask mask;
};

/// Deterministic for a fixed config. Non-background images carry
/// 1 + Poisson(density - 1) ellipses (at least one); exactly
/// round(background_fraction * n_images) images are background-only.
std::vector<LabeledSlice> generate_synthetic(const SyntheticConfig& config);

}  // namespace ral::ingest
