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

#include "ral/ingest/preprocess.hpp"

#include <algorithm>
#include <cmath>

namespace ral::ingest {

void Preprocessing::validate() const {
  if (!(hu_low < hu_high)) throw InvalidArgument("preprocessing: HU window needs low < high");
  if (target_height <= 0 || target_width <= 0) throw InvalidArgument("preprocessing: target size must be positive");
  if (!(std > 0.0)) throw InvalidArgument("preprocessing: normalization std must be positive");
}

Array2D<std::uint8_t> window_to_u8(const Array2D<std::int32_t>& raw_hu, double low, double high) {
  if (raw_hu.empty()) throw InvalidArgument("preprocess: empty input");
  if (!(low < high)) throw InvalidArgument("preprocess: HU window needs low < high");
  Array2D<std::uint8_t> out(raw_hu.rows(), raw_hu.cols());
  auto src = raw_hu.values();
  auto dst = out.values();
  const double scale = 255.0 / (high - low);
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double clipped = std::clamp(static_cast<double>(src[i]), low, high);
    dst[i] = static_cast<std::uint8_t>(std::lround((clipped - low) * scale));
  }
  return out;
}

Array2D<double> resize_bilinear(const Array2D<double>& src, int height, int width) {
  if (src.empty()) throw InvalidArgument("resize: empty input");
  if (height <= 0 || width <= 0) throw InvalidArgument("resize: target size must be positive");
  if (src.rows() == height && src.cols() == width) return src;

  auto axis = [](int out_len, int in_len) {
    struct Tap {
      int i0, i1;
      double w1;
    };
    std::vector<Tap> taps(out_len);
    const double scale = static_cast<double>(in_len) / out_len;
    for (int o = 0; o < out_len; ++o) {
      double s = std::clamp((o + 0.5) * scale - 0.5, 0.0, static_cast<double>(in_len - 1));
      const int i0 = static_cast<int>(std::floor(s));
      taps[o] = {i0, std::min(i0 + 1, in_len - 1), s - i0};
    }
    return taps;
  };
  const auto ty = axis(height, src.rows());
  const auto tx = axis(width, src.cols());
  Array2D<double> out(height, width);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const auto& y = ty[r];
      const auto& x = tx[c];
      const double top = src(y.i0, x.i0) * (1.0 - x.w1) + src(y.i0, x.i1) * x.w1;
      const double bot = src(y.i1, x.i0) * (1.0 - x.w1) + src(y.i1, x.i1) * x.w1;
      out(r, c) = top * (1.0 - y.w1) + bot * y.w1;
    }
  }
  return out;
}

Array2D<double> normalize(const Array2D<double>& u8_values, double mean, double std) {
  Array2D<double> out(u8_values.rows(), u8_values.cols());
  auto src = u8_values.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = (src[i] / 255.0 - mean) / std;
  return out;
}

Array2D<std::uint8_t> denormalize_to_u8(const Array2D<double>& pixels, double mean, double std) {
  Array2D<std::uint8_t> out(pixels.rows(), pixels.cols());
  auto src = pixels.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double v = (src[i] * std + mean) * 255.0;
    dst[i] = static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0L, 255L));
  }
  return out;
}

Array2D<double> preprocess_slice(const Array2D<std::int32_t>& raw_hu, const Preprocessing& prep) {
  prep.validate();
  const auto u8 = window_to_u8(raw_hu, prep.hu_low, prep.hu_high);
  Array2D<double> as_real(u8.rows(), u8.cols());
  std::copy(u8.values().begin(), u8.values().end(), as_real.values().begin());
  return normalize(resize_bilinear(as_real, prep.target_height, prep.target_width), prep.mean, prep.std);
}

GroundTruthMask resize_mask(const GroundTruthMask& mask, int height, int width) {
  if (mask.classes.empty()) throw InvalidArgument("resize_mask: empty mask");
  if (height <= 0 || width <= 0) throw InvalidArgument("resize_mask: target size must be positive");
  validate_binary(mask.classes);
  const int in_h = mask.classes.rows();
  const int in_w = mask.classes.cols();
  GroundTruthMask out{mask.image_id, Array2D<std::uint8_t>(height, width)};
  for (int r = 0; r < height; ++r) {
    const int sr = static_cast<int>(static_cast<long long>(r) * in_h / height);
    for (int c = 0; c < width; ++c) {
      const int sc = static_cast<int>(static_cast<long long>(c) * in_w / width);
      out.classes(r, c) = mask.classes(sr, sc);
    }
  }
  return out;
}

}  // namespace ral::ingest
