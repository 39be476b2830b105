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
#include <variant>
#include <vector>

#include "ral/data/array.hpp"
#include "ral/data/image.hpp"
#include "ral/nn/params.hpp"

namespace ral::nn {

struct DropoutOff {};

/// Inverted dropout: kept units are scaled by 1 / (1 - rate), so the
/// expected input to the following layer matches DropoutOff.
struct Stochastic {
  std::uint64_t seed = 0;
  double rate = 0.5;
};

using DropoutMode = std::variant<DropoutOff, Stochastic>;

/// Intermediate values of one forward pass, kept for backpropagation.
struct ForwardTrace {
  int height = 0;
  int width = 0;
  std::vector<RowMat> inputs;   // layer input (im2col patches for k > 1)
  std::vector<RowMat> pre;      // pre-activation outputs
  std::vector<RowMat> masks;    // dropout multipliers (empty when inactive)
  RowMat probs;                 // P x C softmax output
};

/// Softmax probabilities for every pixel. Throws NumericError when the
/// weights are not finite.
ProbMap forward(const NetworkParams& params, const Array2D<double>& pixels, const DropoutMode& mode);
ProbMap forward(const NetworkParams& params, const ImageSlice& image, const DropoutMode& mode);

/// Forward pass that records what backward() needs.
ForwardTrace forward_trace(const NetworkParams& params, const Array2D<double>& pixels, const DropoutMode& mode);

/// Accumulates d(loss)/d(params) into `grad` given d(loss)/d(logits) (P x C).
void backward(const NetworkParams& params, const ForwardTrace& trace, const RowMat& dlogits, NetworkParams& grad);

/// Seed of the i-th Monte-Carlo sample drawn from `seed`.
std::uint64_t sample_seed(std::uint64_t seed, int index);

/// `count` stochastic passes; sample i equals
/// forward(params, pixels, Stochastic{sample_seed(seed, i), rate}). Layers
/// before the first dropout are evaluated once and shared.
std::vector<ProbMap> forward_samples(const NetworkParams& params, const Array2D<double>& pixels, int count,
                                     std::uint64_t seed, double rate);

/// Row-wise softmax of logits.
RowMat softmax_rows(const RowMat& logits);

ProbMap to_prob_map(const RowMat& probs, int height, int width);

}  // namespace ral::nn
