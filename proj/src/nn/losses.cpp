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

#include "ral/nn/losses.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ral/data/errors.hpp"

namespace ral::nn {

std::string_view to_string(LossKind k) { return k == LossKind::Point ? "point" : "full"; }

namespace {

struct Gathered {
  RowMat probs;
  std::vector<int> labels;
  std::vector<Eigen::Index> rows;  // pixel index in the map
};

Gathered gather(const ProbMap& probs, const PartialLabelMask& labels) {
  if (probs.height() != labels.labels.rows() || probs.width() != labels.labels.cols()) {
    throw InvalidArgument("loss: probability map and label mask shapes differ");
  }
  Gathered g;
  const auto lv = labels.labels.values();
  for (std::size_t i = 0; i < lv.size(); ++i) {
    if (lv[i] == kUnlabeled) continue;
    if (lv[i] != 0 && lv[i] != 1) throw InvalidArgument("loss: label values must be in {-1, 0, 1}");
    g.rows.push_back(static_cast<Eigen::Index>(i));
    g.labels.push_back(lv[i]);
  }
  const int C = probs.classes();
  g.probs.resize(static_cast<Eigen::Index>(g.rows.size()), C);
  const auto pv = probs.values();
  for (std::size_t n = 0; n < g.rows.size(); ++n) {
    for (int c = 0; c < C; ++c) g.probs(static_cast<Eigen::Index>(n), c) = pv[g.rows[n] * C + c];
  }
  return g;
}

// Chains d loss / d prob through the softmax Jacobian.
RowMat through_softmax(const RowMat& probs, const RowMat& dprobs) {
  RowMat dz(probs.rows(), probs.cols());
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    const double dot = probs.row(r).dot(dprobs.row(r));
    for (Eigen::Index c = 0; c < probs.cols(); ++c) dz(r, c) = probs(r, c) * (dprobs(r, c) - dot);
  }
  return dz;
}

GatheredLoss point_gathered(const RowMat& probs, std::span<const int> labels) {
  GatheredLoss out;
  RowMat dp = RowMat::Zero(probs.rows(), probs.cols());
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    const double p = probs(i, labels[i]);
    out.value -= std::log(std::max(p, kProbFloor));
    if (p > kProbFloor) dp(i, labels[i]) = -1.0 / p;
  }
  out.dlogits = through_softmax(probs, dp);
  return out;
}

FullSupTerms full_terms_and_grad(const RowMat& probs, std::span<const int> labels, RowMat* dprobs) {
  FullSupTerms terms;
  const Eigen::Index n = probs.rows();
  if (dprobs != nullptr) *dprobs = RowMat::Zero(probs.rows(), probs.cols());
  if (n == 0) return terms;
  if (probs.cols() < 2) throw InvalidArgument("full_sup_loss: need at least 2 classes");

  Eigen::Index count[2] = {0, 0};
  for (int y : labels) ++count[y];
  const int present = (count[0] > 0) + (count[1] > 0);
  double weight[2] = {0.0, 0.0};
  for (int c = 0; c < 2; ++c) {
    if (count[c] > 0) weight[c] = static_cast<double>(n) / (present * static_cast<double>(count[c]));
  }

  double inter = 0.0;
  double sum_p = 0.0;
  double sum_y = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int y = labels[i];
    const double py = probs(i, y);
    terms.weighted_ce -= weight[y] * std::log(std::max(py, kProbFloor));
    if (dprobs != nullptr && py > kProbFloor) (*dprobs)(i, y) = -weight[y] / (static_cast<double>(n) * py);
    const double p = probs(i, kInfected);
    inter += p * y;
    sum_p += p;
    sum_y += y;
  }
  terms.weighted_ce /= static_cast<double>(n);
  const double uni = sum_p + sum_y - inter;
  terms.iou = 1.0 - (inter + kIouSmooth) / (uni + kIouSmooth);
  if (dprobs != nullptr) {
    const double denom = (uni + kIouSmooth) * (uni + kIouSmooth);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double y = labels[i];
      (*dprobs)(i, kInfected) -= (y * (uni + kIouSmooth) - (inter + kIouSmooth) * (1.0 - y)) / denom;
    }
  }
  return terms;
}

}  // namespace

double point_loss(const ProbMap& probs, const PartialLabelMask& labels) {
  const auto g = gather(probs, labels);
  return point_gathered(g.probs, g.labels).value;
}

FullSupTerms full_sup_terms(const ProbMap& probs, const PartialLabelMask& labels) {
  const auto g = gather(probs, labels);
  return full_terms_and_grad(g.probs, g.labels, nullptr);
}

FullSupTerms full_sup_terms(const ProbMap& probs, const GroundTruthMask& mask) {
  if (probs.height() != mask.classes.rows() || probs.width() != mask.classes.cols()) {
    throw InvalidArgument("full_sup_loss: probability map and mask shapes differ");
  }
  return full_sup_terms(probs, PartialLabelMask::from_ground_truth(mask));
}

double full_sup_loss(const ProbMap& probs, const GroundTruthMask& mask) { return full_sup_terms(probs, mask).total(); }

GatheredLoss gathered_loss(LossKind kind, const RowMat& probs, std::span<const int> labels) {
  if (static_cast<std::size_t>(probs.rows()) != labels.size()) {
    throw InvalidArgument("gathered_loss: probability rows and label count differ");
  }
  if (kind == LossKind::Point) return point_gathered(probs, labels);
  RowMat dp;
  GatheredLoss out;
  out.value = full_terms_and_grad(probs, labels, &dp).total();
  out.dlogits = through_softmax(probs, dp);
  return out;
}

GatheredLoss map_loss(LossKind kind, const ProbMap& probs, const PartialLabelMask& labels) {
  const auto g = gather(probs, labels);
  GatheredLoss part = gathered_loss(kind, g.probs, g.labels);
  GatheredLoss out;
  out.value = part.value;
  out.dlogits = RowMat::Zero(static_cast<Eigen::Index>(probs.pixel_count()), probs.classes());
  for (std::size_t n = 0; n < g.rows.size(); ++n) out.dlogits.row(g.rows[n]) = part.dlogits.row(static_cast<Eigen::Index>(n));
  return out;
}

}  // namespace ral::nn
