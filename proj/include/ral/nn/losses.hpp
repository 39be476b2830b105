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

#include <span>
#include <string_view>

#include "ral/data/array.hpp"
#include "ral/data/image.hpp"
#include "ral/nn/params.hpp"

namespace ral::nn {

inline constexpr double kProbFloor = 1e-12;
inline constexpr double kIouSmooth = 1.0;

enum class LossKind {
  Point,           // cross-entropy summed over labeled pixels
  FullSupervision  // inverse-frequency weighted CE + soft IoU
};

std::string_view to_string(LossKind k);

/// -sum over pixels labeled 0/1 of log(max(p_label, 1e-12)). Unlabeled (-1)
/// pixels contribute nothing; no labels gives 0.
double point_loss(const ProbMap& probs, const PartialLabelMask& labels);

struct FullSupTerms {
  double weighted_ce = 0.0;
  double iou = 0.0;
  double total() const noexcept { return weighted_ce + iou; }
};

/// Weighted CE (class weights ~ 1/frequency, mean weight 1, averaged over
/// pixels) plus 1 - (sum p*y + 1) / (sum p + sum y - sum p*y + 1) with p the
/// infected-class probability.
FullSupTerms full_sup_terms(const ProbMap& probs, const GroundTruthMask& mask);
double full_sup_loss(const ProbMap& probs, const GroundTruthMask& mask);

/// Same loss restricted to pixels whose label is not -1 (region-wise
/// per-pixel supervision).
FullSupTerms full_sup_terms(const ProbMap& probs, const PartialLabelMask& labels);

/// Loss over a gathered set of pixels: probs is n x C, labels[i] in {0, 1}.
struct GatheredLoss {
  double value = 0.0;
  RowMat dlogits;  // n x C, gradient with respect to pre-softmax logits
};

GatheredLoss gathered_loss(LossKind kind, const RowMat& probs, std::span<const int> labels);

/// Gradient of the loss with respect to the logits of every pixel of the map
/// (zero on unlabeled pixels); used to check analytic gradients.
GatheredLoss map_loss(LossKind kind, const ProbMap& probs, const PartialLabelMask& labels);

}  // namespace ral::nn
