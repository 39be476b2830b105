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

#include "ral/uncertainty/uncertainty.hpp"

#include <algorithm>
#include <cmath>

#include "ral/data/errors.hpp"

namespace ral::uncertainty {

std::vector<ProbMap> mc_samples(const nn::Predictor& model, const ImageSlice& image, int count, std::uint64_t seed) {
  if (count < 1) throw InvalidArgument("mc_samples: sample count must be >= 1");
  return model.predict_samples(image, count, seed);
}

ProbMap mean_estimator(std::span<const ProbMap> samples) {
  if (samples.empty()) throw InvalidArgument("mean_estimator: no samples");
  ProbMap mean(samples[0].height(), samples[0].width(), samples[0].classes(), 0.0);
  auto out = mean.values();
  for (const auto& s : samples) {
    if (!s.same_shape(mean)) throw InvalidArgument("mean_estimator: sample shapes differ");
    const auto v = s.values();
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += v[i];
  }
  const double n = static_cast<double>(samples.size());
  for (auto& x : out) x /= n;
  return mean;
}

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return std::max(h, 0.0);
}

EntropyMap entropy_map(const ProbMap& mean_probs, std::string image_id) {
  EntropyMap out{std::move(image_id), Array2D<double>(mean_probs.height(), mean_probs.width()),
                 mean_probs.classes()};
  const double cap = std::log(static_cast<double>(mean_probs.classes()));
  for (int r = 0; r < mean_probs.height(); ++r) {
    for (int c = 0; c < mean_probs.width(); ++c) out.values(r, c) = std::min(entropy(mean_probs.pixel(r, c)), cap);
  }
  return out;
}

EntropyMap mc_entropy(const nn::Predictor& model, const ImageSlice& image, int count, std::uint64_t seed) {
  const auto samples = mc_samples(model, image, count, seed);
  return entropy_map(mean_estimator(samples), image.id);
}

Array2D<std::uint8_t> entropy_to_u8(const EntropyMap& map) {
  const double cap = std::log(static_cast<double>(std::max(map.classes, 2)));
  Array2D<std::uint8_t> out(map.values.rows(), map.values.cols());
  const auto in = map.values.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < in.size(); ++i) {
    dst[i] = static_cast<std::uint8_t>(std::lround(std::clamp(in[i] / cap, 0.0, 1.0) * 255.0));
  }
  return out;
}

}  // namespace ral::uncertainty
