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

#include "ral/data/array.hpp"

namespace ral::eval {

/// Pixel counts pooled over an evaluation set.
struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t total() const noexcept { return tp + fp + fn + tn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(const Array2D<std::uint8_t>& pred, const Array2D<std::uint8_t>& gt);

/// Micro-aggregated over the whole set (counts summed before any ratio).
ConfusionCounts confusion(std::span<const Array2D<std::uint8_t>> preds, std::span<const Array2D<std::uint8_t>> gts);

/// 2tp / (2tp + fp + fn); 1.0 when there is nothing to find and nothing found.
double dice(const ConfusionCounts& counts);

/// tn / (fp + tn); throws UndefinedMetric when there are no negative pixels.
double specificity(const ConfusionCounts& counts);

}  // namespace ral::eval
