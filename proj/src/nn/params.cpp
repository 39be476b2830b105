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

#include "ral/nn/params.hpp"

#include <cmath>
#include <random>

#include "ral/data/errors.hpp"

namespace ral::nn {

std::vector<LayerShape> reference_architecture(int classes) {
  if (classes < 2) throw InvalidArgument("reference_architecture: need at least 2 classes");
  return {
      {1, 16, 3, true, false},
      {16, 32, 3, true, true},
      {32, 32, 3, true, true},
      {32, classes, 1, false, false},
  };
}

NetworkParams::NetworkParams(std::vector<LayerShape> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw InvalidArgument("NetworkParams: no layers");
  std::size_t total = 0;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (l.in_channels < 1 || l.out_channels < 1 || l.kernel < 1 || l.kernel % 2 == 0) {
      throw InvalidArgument("NetworkParams: invalid layer shape");
    }
    if (i > 0 && layers_[i - 1].out_channels != l.in_channels) {
      throw InvalidArgument("NetworkParams: channel counts do not chain");
    }
    offsets_.push_back(total);
    total += l.param_count();
  }
  values_.assign(total, 0.0);
}

int NetworkParams::receptive_radius() const noexcept {
  int r = 0;
  for (const auto& l : layers_) r += l.kernel / 2;
  return r;
}

Eigen::Map<RowMat> NetworkParams::weight(int layer) {
  const auto& l = layers_.at(layer);
  return {values_.data() + offsets_[layer], l.patch_size(), l.out_channels};
}

Eigen::Map<const RowMat> NetworkParams::weight(int layer) const {
  const auto& l = layers_.at(layer);
  return {values_.data() + offsets_[layer], l.patch_size(), l.out_channels};
}

Eigen::Map<Eigen::RowVectorXd> NetworkParams::bias(int layer) {
  const auto& l = layers_.at(layer);
  return {values_.data() + offsets_[layer] + l.weight_count(), l.out_channels};
}

Eigen::Map<const Eigen::RowVectorXd> NetworkParams::bias(int layer) const {
  const auto& l = layers_.at(layer);
  return {values_.data() + offsets_[layer] + l.weight_count(), l.out_channels};
}

bool NetworkParams::all_finite() const noexcept {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void NetworkParams::set_zero() noexcept { std::fill(values_.begin(), values_.end(), 0.0); }

NetworkParams init_he_normal(std::vector<LayerShape> layers, std::uint64_t seed) {
  NetworkParams params(std::move(layers));
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < params.layers().size(); ++i) {
    const double stddev = std::sqrt(2.0 / params.layers()[i].patch_size());
    std::normal_distribution<double> dist(0.0, stddev);
    auto w = params.weight(static_cast<int>(i));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = dist(rng);
    }
  }
  return params;
}

NetworkParams init_reference(int classes, std::uint64_t seed) {
  return init_he_normal(reference_architecture(classes), seed);
}

}  // namespace ral::nn
