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

#include "ral/ingest/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "ral/data/errors.hpp"

namespace ral::ingest {

void SyntheticConfig::validate() const {
  if (height <= 0 || width <= 0) throw InvalidArgument("synthetic: image size must be positive");
  if (n_images < 0) throw InvalidArgument("synthetic: n_images must be >= 0");
  if (background_fraction < 0.0 || background_fraction > 1.0) {
    throw InvalidArgument("synthetic: background_fraction must be in [0, 1]");
  }
  if (ellipse_density < 0.0) throw InvalidArgument("synthetic: ellipse_density must be >= 0");
  if (!(radius_min > 0.0) || radius_max < radius_min) throw InvalidArgument("synthetic: bad radius range");
  if (noise < 0.0) throw InvalidArgument("synthetic: noise must be >= 0");
  if (slices_per_scan < 1) throw InvalidArgument("synthetic: slices_per_scan must be >= 1");
  if (distractors < 0) throw InvalidArgument("synthetic: distractors must be >= 0");
  if (!(std > 0.0)) throw InvalidArgument("synthetic: std must be positive");
}

namespace {

struct Ellipse {
  double cy, cx, a, b, angle;

  bool contains(double y, double x) const {
    const double dy = y - cy;
    const double dx = x - cx;
    const double cs = std::cos(angle);
    const double sn = std::sin(angle);
    const double u = (dx * cs + dy * sn) / a;
    const double v = (-dx * sn + dy * cs) / b;
    return u * u + v * v <= 1.0;
  }
};

double center_coord(std::mt19937_64& rng, int extent, double margin) {
  if (extent > 2.0 * margin) {
    return std::uniform_real_distribution<double>(margin, extent - margin)(rng);
  }
  return std::uniform_real_distribution<double>(0.0, extent)(rng);
}

Ellipse sample_ellipse(std::mt19937_64& rng, const SyntheticConfig& cfg) {
  std::uniform_real_distribution<double> radius(cfg.radius_min, cfg.radius_max);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  const double a = radius(rng);
  const double b = radius(rng);
  const double cy = center_coord(rng, cfg.height, cfg.radius_max);
  const double cx = center_coord(rng, cfg.width, cfg.radius_max);
  return {cy, cx, a, b, angle(rng)};
}

}  // namespace

std::vector<LabeledSlice> generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);

  const int n_background = static_cast<int>(std::lround(cfg.background_fraction * cfg.n_images));
  std::vector<int> order(cfg.n_images);
  for (int i = 0; i < cfg.n_images; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> background_only(cfg.n_images, false);
  for (int i = 0; i < n_background; ++i) background_only[order[i]] = true;

  const double extra_mean = std::max(cfg.ellipse_density - 1.0, 0.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<LabeledSlice> out;
  out.reserve(cfg.n_images);
  for (int i = 0; i < cfg.n_images; ++i) {
    std::vector<Ellipse> lesions;
    if (!background_only[i] && cfg.ellipse_density > 0.0) {
      int count = 1;
      if (extra_mean > 0.0) count += std::poisson_distribution<int>(extra_mean)(rng);
      for (int e = 0; e < count; ++e) lesions.push_back(sample_ellipse(rng, cfg));
    }
    std::vector<Ellipse> decoys;
    for (int d = 0; d < cfg.distractors; ++d) {
      Ellipse e = sample_ellipse(rng, cfg);
      // Thin elongated bright structures that are not lesions.
      e.a = cfg.radius_max * 1.5;
      e.b = 1.0;
      decoys.push_back(e);
    }

    const std::string scan = "scan" + std::to_string(i / cfg.slices_per_scan);
    char id[32];
    std::snprintf(id, sizeof(id), "synth%05d", i);
    LabeledSlice slice;
    slice.image.id = id;
    slice.image.scan_id = scan;
    slice.image.slice_index = i % cfg.slices_per_scan;
    slice.image.pixels = Array2D<double>(cfg.height, cfg.width);
    slice.mask.image_id = id;
    slice.mask.classes = Array2D<std::uint8_t>(cfg.height, cfg.width, 0);

    for (int r = 0; r < cfg.height; ++r) {
      for (int c = 0; c < cfg.width; ++c) {
        const double y = r + 0.5;
        const double x = c + 0.5;
        bool infected = false;
        for (const auto& e : lesions) infected = infected || e.contains(y, x);
        bool decoy = false;
        for (const auto& e : decoys) decoy = decoy || e.contains(y, x);
        double v = cfg.base_intensity + cfg.noise * gauss(rng);
        if (infected || decoy) v += cfg.contrast;
        const double u8 = std::clamp(std::round(v * 255.0), 0.0, 255.0);
        slice.image.pixels(r, c) = (u8 / 255.0 - cfg.mean) / cfg.std;
        slice.mask.classes(r, c) = infected ? 1 : 0;
      }
    }
    out.push_back(std::move(slice));
  }
  return out;
}

}  // namespace ral::ingest
