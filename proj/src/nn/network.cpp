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

#include "ral/nn/network.hpp"

#include <cmath>
#include <random>

#include "ral/data/errors.hpp"
#include "ral/data/seed.hpp"

namespace ral::nn {

namespace {

// P x (k*k*C) patch matrix with zero padding; column order (ky, kx, c).
RowMat im2col(const RowMat& x, int h, int w, int k) {
  const int ch = static_cast<int>(x.cols());
  const int half = k / 2;
  RowMat cols = RowMat::Zero(static_cast<Eigen::Index>(h) * w, static_cast<Eigen::Index>(k) * k * ch);
  const double* src = x.data();
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double* dst = cols.data() + (static_cast<std::size_t>(r) * w + c) * cols.cols();
      for (int ky = 0; ky < k; ++ky) {
        const int sr = r + ky - half;
        if (sr < 0 || sr >= h) continue;
        for (int kx = 0; kx < k; ++kx) {
          const int sc = c + kx - half;
          if (sc < 0 || sc >= w) continue;
          const double* s = src + (static_cast<std::size_t>(sr) * w + sc) * ch;
          double* d = dst + (ky * k + kx) * ch;
          for (int i = 0; i < ch; ++i) d[i] = s[i];
        }
      }
    }
  }
  return cols;
}

// Adjoint of im2col.
RowMat col2im(const RowMat& cols, int h, int w, int k, int ch) {
  const int half = k / 2;
  RowMat x = RowMat::Zero(static_cast<Eigen::Index>(h) * w, ch);
  double* dst = x.data();
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double* src = cols.data() + (static_cast<std::size_t>(r) * w + c) * cols.cols();
      for (int ky = 0; ky < k; ++ky) {
        const int sr = r + ky - half;
        if (sr < 0 || sr >= h) continue;
        for (int kx = 0; kx < k; ++kx) {
          const int sc = c + kx - half;
          if (sc < 0 || sc >= w) continue;
          double* d = dst + (static_cast<std::size_t>(sr) * w + sc) * ch;
          const double* s = src + (ky * k + kx) * ch;
          for (int i = 0; i < ch; ++i) d[i] += s[i];
        }
      }
    }
  }
  return x;
}

RowMat dropout_mask(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, int layer, double rate) {
  std::mt19937_64 rng(derive_seed(seed, {static_cast<std::uint64_t>(layer)}));
  const double keep_scale = 1.0 / (1.0 - rate);
  RowMat mask(rows, cols);
  double* m = mask.data();
  for (Eigen::Index i = 0; i < mask.size(); ++i) m[i] = to_unit(rng()) < rate ? 0.0 : keep_scale;
  return mask;
}

struct Pass {
  const NetworkParams& params;
  int h;
  int w;
  ForwardTrace* trace;  // null when gradients are not needed

  // Runs layers [first, last) starting from activation x; returns the output
  // of the last layer run (post-ReLU and post-dropout where applicable).
  RowMat run(RowMat x, std::size_t first, std::size_t last, const DropoutMode& mode) const {
    const auto& layers = params.layers();
    for (std::size_t i = first; i < last; ++i) {
      const auto& l = layers[i];
      RowMat in = l.kernel > 1 ? im2col(x, h, w, l.kernel) : std::move(x);
      RowMat z(in.rows(), l.out_channels);
      z.noalias() = in * params.weight(static_cast<int>(i));
      z.rowwise() += params.bias(static_cast<int>(i));
      RowMat a = l.relu ? RowMat(z.cwiseMax(0.0)) : z;
      RowMat mask;
      if (l.dropout_after) {
        if (const auto* s = std::get_if<Stochastic>(&mode); s != nullptr && s->rate > 0.0) {
          mask = dropout_mask(a.rows(), a.cols(), s->seed, static_cast<int>(i), s->rate);
          a.array() *= mask.array();
        }
      }
      if (trace != nullptr) {
        trace->inputs[i] = std::move(in);
        trace->pre[i] = std::move(z);
        trace->masks[i] = std::move(mask);
      }
      x = std::move(a);
    }
    return x;
  }
};

void check_inputs(const NetworkParams& params, const Array2D<double>& pixels, const DropoutMode& mode) {
  if (pixels.rows() <= 0 || pixels.cols() <= 0) throw InvalidArgument("forward: image shape must be positive");
  if (params.layers().empty() || params.layers().front().in_channels != 1) {
    throw InvalidArgument("forward: network must take a single input channel");
  }
  if (!params.all_finite()) throw NumericError("forward: non-finite weights");
  if (const auto* s = std::get_if<Stochastic>(&mode); s != nullptr && (s->rate < 0.0 || s->rate >= 1.0)) {
    throw InvalidArgument("forward: dropout rate must be in [0, 1)");
  }
}

RowMat input_matrix(const Array2D<double>& pixels) {
  RowMat x(static_cast<Eigen::Index>(pixels.size()), 1);
  std::copy(pixels.values().begin(), pixels.values().end(), x.data());
  return x;
}

std::size_t first_dropout_layer(const NetworkParams& params) {
  const auto& layers = params.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].dropout_after) return i;
  }
  return layers.size();
}

}  // namespace

RowMat softmax_rows(const RowMat& logits) {
  RowMat p(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double m = logits.row(r).maxCoeff();
    double sum = 0.0;
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
      p(r, c) = std::exp(logits(r, c) - m);
      sum += p(r, c);
    }
    p.row(r) /= sum;
  }
  return p;
}

ProbMap to_prob_map(const RowMat& probs, int height, int width) {
  std::vector<double> v(probs.data(), probs.data() + probs.size());
  return ProbMap(height, width, static_cast<int>(probs.cols()), std::move(v));
}

ProbMap forward(const NetworkParams& params, const Array2D<double>& pixels, const DropoutMode& mode) {
  check_inputs(params, pixels, mode);
  Pass pass{params, pixels.rows(), pixels.cols(), nullptr};
  const std::size_t split = first_dropout_layer(params) + 1;
  const std::size_t n = params.layers().size();
  RowMat trunk = pass.run(input_matrix(pixels), 0, std::min(split, n), DropoutOff{});
  // The trunk output is re-run through the dropout of its last layer so that
  // this path and forward_samples apply identical masks.
  RowMat x = std::move(trunk);
  if (split <= n) {
    const auto& l = params.layers()[split - 1];
    if (l.dropout_after) {
      if (const auto* s = std::get_if<Stochastic>(&mode); s != nullptr && s->rate > 0.0) {
        x.array() *= dropout_mask(x.rows(), x.cols(), s->seed, static_cast<int>(split - 1), s->rate).array();
      }
    }
  }
  RowMat logits = pass.run(std::move(x), std::min(split, n), n, mode);
  return to_prob_map(softmax_rows(logits), pixels.rows(), pixels.cols());
}

ProbMap forward(const NetworkParams& params, const ImageSlice& image, const DropoutMode& mode) {
  return forward(params, image.pixels, mode);
}

ForwardTrace forward_trace(const NetworkParams& params, const Array2D<double>& pixels, const DropoutMode& mode) {
  check_inputs(params, pixels, mode);
  const std::size_t n = params.layers().size();
  ForwardTrace trace;
  trace.height = pixels.rows();
  trace.width = pixels.cols();
  trace.inputs.resize(n);
  trace.pre.resize(n);
  trace.masks.resize(n);
  Pass pass{params, pixels.rows(), pixels.cols(), &trace};
  RowMat logits = pass.run(input_matrix(pixels), 0, n, mode);
  trace.probs = softmax_rows(logits);
  return trace;
}

void backward(const NetworkParams& params, const ForwardTrace& trace, const RowMat& dlogits, NetworkParams& grad) {
  const auto& layers = params.layers();
  if (grad.layers() != layers) throw InvalidArgument("backward: gradient buffer has a different architecture");
  RowMat dout = dlogits;  // d loss / d (output of layer i after activation + dropout)
  for (std::size_t idx = layers.size(); idx-- > 0;) {
    const auto& l = layers[idx];
    const int i = static_cast<int>(idx);
    RowMat dz = std::move(dout);
    if (trace.masks[idx].size() > 0) dz.array() *= trace.masks[idx].array();
    if (l.relu) dz.array() *= (trace.pre[idx].array() > 0.0).cast<double>();
    grad.weight(i).noalias() += trace.inputs[idx].transpose() * dz;
    grad.bias(i) += dz.colwise().sum();
    if (idx == 0) break;
    RowMat dinput(dz.rows(), l.patch_size());
    dinput.noalias() = dz * params.weight(i).transpose();
    dout = l.kernel > 1 ? col2im(dinput, trace.height, trace.width, l.kernel, l.in_channels) : std::move(dinput);
  }
}

std::uint64_t sample_seed(std::uint64_t seed, int index) {
  return derive_seed(seed, {0x4d43ULL, static_cast<std::uint64_t>(index)});
}

std::vector<ProbMap> forward_samples(const NetworkParams& params, const Array2D<double>& pixels, int count,
                                     std::uint64_t seed, double rate) {
  if (count < 1) throw InvalidArgument("forward_samples: need at least one sample");
  check_inputs(params, pixels, Stochastic{seed, rate});
  Pass pass{params, pixels.rows(), pixels.cols(), nullptr};
  const std::size_t n = params.layers().size();
  const std::size_t split = std::min(first_dropout_layer(params) + 1, n);
  const RowMat trunk = pass.run(input_matrix(pixels), 0, split, DropoutOff{});
  std::vector<ProbMap> out;
  out.reserve(count);
  for (int s = 0; s < count; ++s) {
    const Stochastic mode{sample_seed(seed, s), rate};
    RowMat x = trunk;
    const auto& l = params.layers()[split - 1];
    if (l.dropout_after && rate > 0.0) {
      x.array() *= dropout_mask(x.rows(), x.cols(), mode.seed, static_cast<int>(split - 1), rate).array();
    }
    RowMat logits = pass.run(std::move(x), split, n, mode);
    out.push_back(to_prob_map(softmax_rows(logits), pixels.rows(), pixels.cols()));
  }
  return out;
}

}  // namespace ral::nn
