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
#include <vector>

#include <Eigen/Core>

namespace ral::nn {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct LayerShape {
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 1;
  bool relu = true;          // ReLU on the layer output
  bool dropout_after = false;

  std::size_t weight_count() const noexcept {
    return static_cast<std::size_t>(kernel) * kernel * in_channels * out_channels;
  }
  std::size_t param_count() const noexcept { return weight_count() + out_channels; }
  int patch_size() const noexcept { return kernel * kernel * in_channels; }
  friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

/// The reference architecture: 3x3 1->16, 3x3 16->32, 3x3 32->32, 1x1 32->C,
/// stride 1, same padding, ReLU between convolutions, dropout after the
/// second and third layers.
std::vector<LayerShape> reference_architecture(int classes);

/// All weights and biases in one flat buffer. Layer l's weight block is a
/// row-major (kernel*kernel*in) x out matrix with rows ordered
/// (ky, kx, in_channel), followed by its `out` biases.
class NetworkParams {
 public:
  NetworkParams() = default;
  explicit NetworkParams(std::vector<LayerShape> layers);

  const std::vector<LayerShape>& layers() const noexcept { return layers_; }
  int classes() const noexcept { return layers_.empty() ? 0 : layers_.back().out_channels; }
  int receptive_radius() const noexcept;

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  Eigen::Map<RowMat> weight(int layer);
  Eigen::Map<const RowMat> weight(int layer) const;
  Eigen::Map<Eigen::RowVectorXd> bias(int layer);
  Eigen::Map<const Eigen::RowVectorXd> bias(int layer) const;

  bool all_finite() const noexcept;
  void set_zero() noexcept;

  friend bool operator==(const NetworkParams&, const NetworkParams&) = default;

 private:
  std::vector<LayerShape> layers_;
  std::vector<std::size_t> offsets_;
  // Max-aligned so vectorized reductions see the same layout every run.
  std::vector<double, Eigen::aligned_allocator<double>> values_;
};

/// He-normal kernels (std = sqrt(2 / fan_in)), zero biases.
NetworkParams init_he_normal(std::vector<LayerShape> layers, std::uint64_t seed);
NetworkParams init_reference(int classes, std::uint64_t seed);

}  // namespace ral::nn
