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
#include <optional>
#include <span>
#include <vector>

#include "ral/data/grid.hpp"
#include "ral/data/image.hpp"
#include "ral/nn/adam.hpp"
#include "ral/nn/losses.hpp"
#include "ral/nn/network.hpp"
#include "ral/nn/params.hpp"

namespace ral::nn {

struct TrainConfig {
  double learning_rate = 1e-4;
  int batch_size = 1;
  int max_epochs = 40;
  double dropout = 0.5;
  int patience = 0;  // stop after this many epochs without a val improvement; 0 disables
  std::uint64_t seed = 0;
  AdamConfig adam;

  void validate() const;
};

/// Parameters together with the optimizer moments that produced them.
struct Model {
  NetworkParams params;
  AdamState optimizer;

  friend bool operator==(const Model&, const Model&) = default;
};

struct TrainExample {
  const ImageSlice* image = nullptr;
  const PartialLabelMask* labels = nullptr;
  LossKind loss = LossKind::Point;
};

struct ValExample {
  const ImageSlice* image = nullptr;
  const GroundTruthMask* mask = nullptr;
};

struct TrainOutcome {
  Model model;                       // best-validation snapshot (or last epoch)
  std::optional<double> best_val_dice;
  int best_epoch = 0;                // 1-based epoch of the returned snapshot
  int epochs_run = 0;
  std::vector<double> epoch_losses;  // summed example losses per epoch
};

/// Sub-windows of an image that together cover every labeled pixel with
/// enough context for an exact forward pass at those pixels.
std::vector<Rect> plan_windows(const PartialLabelMask& labels, int receptive_radius, int block = 16);

/// Loss of one example and its gradient accumulated into `grad`. Only the
/// windows from plan_windows are evaluated.
double example_gradient(const NetworkParams& params, const TrainExample& example, const DropoutMode& mode,
                        NetworkParams& grad);

/// Micro Dice of argmax predictions (dropout off) over a validation set.
double validation_dice(const NetworkParams& params, std::span<const ValExample> val);

/// Adam on batch-size-B shuffled passes for up to max_epochs epochs,
/// keeping the parameters with the best validation Dice.
TrainOutcome train_cycle(Model start, std::span<const TrainExample> labeled, std::span<const ValExample> val,
                         const TrainConfig& config);

}  // namespace ral::nn
