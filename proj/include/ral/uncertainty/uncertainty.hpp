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
#include <span>
#include <string>
#include <vector>

#include "ral/data/array.hpp"
#include "ral/data/image.hpp"
#include "ral/nn/predictor.hpp"

namespace ral::uncertainty {

inline constexpr int kDefaultSamples = 8;

/// Per-pixel entropy in nats; every value lies in [0, ln C].
struct EntropyMap {
  std::string image_id;
  Array2D<double> values;
  int classes = 2;
};

/// `count` posterior samples with independent dropout masks derived from
/// (seed, sample index).
std::vector<ProbMap> mc_samples(const nn::Predictor& model, const ImageSlice& image, int count, std::uint64_t seed);

/// Pixelwise arithmetic mean of the samples.
ProbMap mean_estimator(std::span<const ProbMap> samples);

/// H = -sum_c p_c ln p_c, with 0 ln 0 = 0.
double entropy(std::span<const double> p);
EntropyMap entropy_map(const ProbMap& mean_probs, std::string image_id = {});

/// mc_samples -> mean_estimator -> entropy_map.
EntropyMap mc_entropy(const nn::Predictor& model, const ImageSlice& image, int count, std::uint64_t seed);

/// 8-bit rendering scaled so ln C maps to 255.
Array2D<std::uint8_t> entropy_to_u8(const EntropyMap& map);

}  // namespace ral::uncertainty
