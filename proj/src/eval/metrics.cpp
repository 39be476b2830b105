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

#include "ral/eval/metrics.hpp"

#include "ral/data/errors.hpp"

namespace ral::eval {

ConfusionCounts confusion(const Array2D<std::uint8_t>& pred, const Array2D<std::uint8_t>& gt) {
  if (!pred.same_shape(gt)) throw InvalidArgument("confusion: prediction and ground truth shapes differ");
  ConfusionCounts c;
  auto p = pred.values();
  auto g = gt.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const bool pos = p[i] != 0;
    const bool truth = g[i] != 0;
    if (pos && truth) ++c.tp;
    else if (pos) ++c.fp;
    else if (truth) ++c.fn;
    else ++c.tn;
  }
  return c;
}

ConfusionCounts confusion(std::span<const Array2D<std::uint8_t>> preds, std::span<const Array2D<std::uint8_t>> gts) {
  if (preds.size() != gts.size()) throw InvalidArgument("confusion: list lengths differ");
  ConfusionCounts total;
  for (std::size_t i = 0; i < preds.size(); ++i) total += confusion(preds[i], gts[i]);
  return total;
}

double dice(const ConfusionCounts& c) {
  const std::int64_t denom = 2 * c.tp + c.fp + c.fn;
  if (denom == 0) return 1.0;
  return static_cast<double>(2 * c.tp) / static_cast<double>(denom);
}

double specificity(const ConfusionCounts& c) {
  const std::int64_t denom = c.fp + c.tn;
  if (denom == 0) throw UndefinedMetric("specificity undefined: no negative pixels in ground truth");
  return static_cast<double>(c.tn) / static_cast<double>(denom);
}

}  // namespace ral::eval
