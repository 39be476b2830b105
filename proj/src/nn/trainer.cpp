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

#include "ral/nn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "ral/data/errors.hpp"
#include "ral/data/seed.hpp"
#include "ral/eval/metrics.hpp"

namespace ral::nn {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InvalidArgument("train config: learning rate must be > 0");
  if (dropout < 0.0 || dropout >= 1.0) throw InvalidArgument("train config: dropout must be in [0, 1)");
  if (max_epochs < 1) throw InvalidArgument("train config: max_epochs must be >= 1");
  if (batch_size < 1) throw InvalidArgument("train config: batch_size must be >= 1");
  if (patience < 0) throw InvalidArgument("train config: patience must be >= 0");
}

namespace {

struct Box {
  int r0 = 0, c0 = 0, r1 = -1, c1 = -1;  // inclusive
  void add(int r, int c) {
    if (r1 < r0) {
      r0 = r1 = r;
      c0 = c1 = c;
      return;
    }
    r0 = std::min(r0, r);
    r1 = std::max(r1, r);
    c0 = std::min(c0, c);
    c1 = std::max(c1, c);
  }
  Rect expanded(int margin, int h, int w) const {
    const int top = std::max(0, r0 - margin);
    const int left = std::max(0, c0 - margin);
    const int bottom = std::min(h - 1, r1 + margin);
    const int right = std::min(w - 1, c1 + margin);
    return {top, left, bottom - top + 1, right - left + 1};
  }
};

Array2D<double> crop(const Array2D<double>& src, const Rect& r) {
  Array2D<double> out(r.height, r.width);
  for (int y = 0; y < r.height; ++y) {
    std::copy_n(&src(r.row + y, r.col), r.width, &out(y, 0));
  }
  return out;
}

}  // namespace

std::vector<Rect> plan_windows(const PartialLabelMask& labels, int receptive_radius, int block) {
  const auto& lab = labels.labels;
  const int h = lab.rows();
  const int w = lab.cols();
  Box all;
  std::map<std::pair<int, int>, Box> blocks;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (lab(r, c) == kUnlabeled) continue;
      all.add(r, c);
      blocks[{r / block, c / block}].add(r, c);
    }
  }
  if (blocks.empty()) return {};
  std::vector<Rect> tiles;
  long tiled_area = 0;
  for (const auto& [key, box] : blocks) {
    tiles.push_back(box.expanded(receptive_radius, h, w));
    tiled_area += tiles.back().area();
  }
  const Rect whole = all.expanded(receptive_radius, h, w);
  if (tiled_area < whole.area()) return tiles;
  return {whole};
}

double example_gradient(const NetworkParams& params, const TrainExample& ex, const DropoutMode& mode,
                        NetworkParams& grad) {
  if (ex.image == nullptr || ex.labels == nullptr) throw InvalidArgument("train example is missing data");
  const auto& lab = ex.labels->labels;
  if (lab.rows() != ex.image->height() || lab.cols() != ex.image->width()) {
    throw InvalidArgument("train example " + ex.image->id + ": label shape differs from image");
  }
  const auto windows = plan_windows(*ex.labels, params.receptive_radius());
  if (windows.empty()) return 0.0;

  struct Owned {
    Rect rect;
    ForwardTrace trace;
    std::vector<Eigen::Index> local_rows;
  };
  std::vector<Owned> parts;
  parts.reserve(windows.size());
  // Each labeled pixel is owned by the first window containing it.
  Array2D<std::uint8_t> claimed(lab.rows(), lab.cols(), 0);
  std::vector<int> labels;
  std::size_t total = 0;
  for (std::size_t wi = 0; wi < windows.size(); ++wi) {
    const Rect& rect = windows[wi];
    DropoutMode window_mode = mode;
    if (auto* s = std::get_if<Stochastic>(&window_mode)) s->seed = derive_seed(s->seed, {wi});
    Owned part{rect, forward_trace(params, crop(ex.image->pixels, rect), window_mode), {}};
    for (int y = 0; y < rect.height; ++y) {
      for (int x = 0; x < rect.width; ++x) {
        const int r = rect.row + y;
        const int c = rect.col + x;
        if (lab(r, c) == kUnlabeled || claimed(r, c) != 0) continue;
        claimed(r, c) = 1;
        part.local_rows.push_back(static_cast<Eigen::Index>(y) * rect.width + x);
        labels.push_back(lab(r, c));
      }
    }
    total += part.local_rows.size();
    parts.push_back(std::move(part));
  }

  const int C = params.classes();
  RowMat probs(static_cast<Eigen::Index>(total), C);
  Eigen::Index k = 0;
  for (const auto& part : parts) {
    for (auto row : part.local_rows) probs.row(k++) = part.trace.probs.row(row);
  }
  const GatheredLoss loss = gathered_loss(ex.loss, probs, labels);
  k = 0;
  for (const auto& part : parts) {
    RowMat dlogits = RowMat::Zero(part.trace.probs.rows(), C);
    for (auto row : part.local_rows) dlogits.row(row) = loss.dlogits.row(k++);
    backward(params, part.trace, dlogits, grad);
  }
  return loss.value;
}

double validation_dice(const NetworkParams& params, std::span<const ValExample> val) {
  eval::ConfusionCounts counts;
  for (const auto& v : val) {
    const auto probs = forward(params, *v.image, DropoutOff{});
    counts += eval::confusion(argmax_mask(probs), v.mask->classes);
  }
  return eval::dice(counts);
}

TrainOutcome train_cycle(Model start, std::span<const TrainExample> labeled, std::span<const ValExample> val,
                         const TrainConfig& config) {
  config.validate();
  if (labeled.empty()) throw InvalidArgument("train_cycle: no labeled images");
  if (!start.params.all_finite()) throw NumericError("train_cycle: starting parameters are not finite");

  TrainOutcome out;
  Model current = std::move(start);
  NetworkParams grad(current.params.layers());
  std::vector<std::size_t> order(labeled.size());
  std::iota(order.begin(), order.end(), 0);
  int since_best = 0;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::mt19937_64 rng(derive_seed(config.seed, {0xE0ULL, static_cast<std::uint64_t>(epoch)}));
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t in_batch = 0;
    grad.set_zero();
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      const DropoutMode mode = Stochastic{
          derive_seed(config.seed, {0xD0ULL, static_cast<std::uint64_t>(epoch), pos}), config.dropout};
      epoch_loss += example_gradient(current.params, labeled[order[pos]], mode, grad);
      ++in_batch;
      if (in_batch == static_cast<std::size_t>(config.batch_size) || pos + 1 == order.size()) {
        auto g = grad.values();
        if (in_batch > 1) {
          for (auto& x : g) x /= static_cast<double>(in_batch);
        }
        adam_step(current.params.values(), g, current.optimizer, config.learning_rate, config.adam);
        grad.set_zero();
        in_batch = 0;
      }
    }
    if (!std::isfinite(epoch_loss) || !current.params.all_finite()) {
      throw NumericError("train_cycle: non-finite loss at epoch " + std::to_string(epoch));
    }
    out.epoch_losses.push_back(epoch_loss);
    out.epochs_run = epoch;

    if (val.empty()) {
      out.model = current;
      out.best_epoch = epoch;
      continue;
    }
    const double d = validation_dice(current.params, val);
    // Ties move the snapshot forward; only a strict gain resets patience.
    const bool improved = !out.best_val_dice || d > *out.best_val_dice;
    if (improved || d == *out.best_val_dice) {
      out.best_val_dice = d;
      out.best_epoch = epoch;
      out.model = current;
    }
    if (improved) {
      since_best = 0;
    } else if (config.patience > 0 && ++since_best >= config.patience) {
      break;
    }
  }
  return out;
}

}  // namespace ral::nn
