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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "ral/ingest/manifest.hpp"
#include "ral/ingest/png_io.hpp"
#include "ral/ingest/preprocess.hpp"
#include "ral/ingest/synthetic.hpp"
#include "temp_dir.hpp"

using namespace ral;
using namespace ral::ingest;

namespace {

Array2D<std::int32_t> hu_row(std::vector<std::int32_t> v) {
  const int n = static_cast<int>(v.size());
  return Array2D<std::int32_t>(1, n, std::move(v));
}

}  // namespace

TEST_CASE("HU window maps to uint8 endpoints and midpoint") {
  const auto u8 = window_to_u8(hu_row({-1000, 400, -300, -2000, 3000}), -1000, 400);
  CHECK(u8(0, 0) == 0);
  CHECK(u8(0, 1) == 255);
  CHECK(u8(0, 2) == 128);
  CHECK(u8(0, 3) == 0);
  CHECK(u8(0, 4) == 255);
  CHECK_THROWS_AS(window_to_u8(hu_row({0}), 10, 10), InvalidArgument);
  CHECK_THROWS_AS(window_to_u8(Array2D<std::int32_t>(), -1000, 400), InvalidArgument);
}

TEST_CASE("preprocess_slice is order preserving inside the window") {
  Preprocessing prep;
  prep.target_height = 1;
  prep.target_width = 64;
  std::vector<std::int32_t> values;
  for (int i = 0; i < 64; ++i) values.push_back(-1000 + i * 22);
  const auto out = preprocess_slice(hu_row(values), prep);
  for (int i = 1; i < 64; ++i) CHECK(out(0, i) >= out(0, i - 1));
  CHECK(out(0, 0) == doctest::Approx((0.0 - 0.485) / 0.229));
}

TEST_CASE("preprocess_slice is idempotent on windowed input up to normalization") {
  Preprocessing prep;
  prep.target_height = 4;
  prep.target_width = 4;
  std::mt19937 rng(5);
  std::vector<std::int32_t> v(16);
  for (auto& x : v) x = -1000 + static_cast<int>(rng() % 1401);
  const Array2D<std::int32_t> raw(4, 4, v);
  const auto once = denormalize_to_u8(preprocess_slice(raw, prep), prep.mean, prep.std);
  // Re-express the uint8 result as HU on the same window and run it again.
  std::vector<std::int32_t> back;
  for (auto x : once.values()) back.push_back(static_cast<std::int32_t>(std::lround(-1000 + x * 1400.0 / 255.0)));
  const auto twice = denormalize_to_u8(preprocess_slice(Array2D<std::int32_t>(4, 4, back), prep), prep.mean, prep.std);
  CHECK(once == twice);
}

TEST_CASE("resize_mask uses nearest neighbour") {
  GroundTruthMask m{"m", Array2D<std::uint8_t>(2, 2, std::vector<std::uint8_t>{1, 0, 0, 0})};
  CHECK(resize_mask(m, 2, 2).classes == m.classes);
  const auto big = resize_mask(m, 4, 4);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) CHECK(big.classes(r, c) == ((r < 2 && c < 2) ? 1 : 0));
  }
  GroundTruthMask ones{"o", Array2D<std::uint8_t>(2, 2, 1)};
  const auto resized = resize_mask(ones, 4, 4);
  for (auto v : resized.classes.values()) CHECK(v == 1);
}

TEST_CASE("bilinear resize preserves constants and identity") {
  Array2D<double> a(3, 5, 0.25);
  const auto stretched = resize_bilinear(a, 7, 2);
  for (auto v : stretched.values()) CHECK(v == doctest::Approx(0.25));
  Array2D<double> b(2, 3, std::vector<double>{1, 2, 3, 4, 5, 6});
  CHECK(resize_bilinear(b, 2, 3) == b);
}

TEST_CASE("synthetic generator is deterministic and honours background fraction") {
  SyntheticConfig cfg;
  cfg.n_images = 20;
  const auto a = generate_synthetic(cfg);
  const auto b = generate_synthetic(cfg);
  REQUIRE(a.size() == 20);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].image.pixels == b[i].image.pixels);
    CHECK(a[i].mask.classes == b[i].mask.classes);
  }
  int empty = 0;
  for (const auto& s : a) {
    bool any = false;
    for (auto v : s.mask.classes.values()) any = any || v != 0;
    empty += any ? 0 : 1;
  }
  CHECK(empty == 6);

  cfg.background_fraction = 1.0;
  for (const auto& s : generate_synthetic(cfg)) {
    for (auto v : s.mask.classes.values()) CHECK(v == 0);
  }
  cfg.height = 0;
  CHECK_THROWS_AS(generate_synthetic(cfg), InvalidArgument);
}

TEST_CASE("synthetic infected fraction tracks its sampling law") {
  SyntheticConfig cfg;
  cfg.n_images = 100;
  cfg.background_fraction = 0.0;
  cfg.ellipse_density = 2.0;
  long infected = 0;
  for (const auto& s : generate_synthetic(cfg)) {
    for (auto v : s.mask.classes.values()) infected += v;
  }
  const double measured = static_cast<double>(infected) / (100.0 * 64 * 64);
  // Semi-axes are independent U(3, 7): E[a*b] = 25.
  const double expected = std::numbers::pi * 25.0 * 2.0 / 4096.0;
  CHECK(measured > 0.5 * expected);
  CHECK(measured < 1.5 * expected);
}

TEST_CASE("infected pixels are brighter on average") {
  SyntheticConfig cfg;
  cfg.n_images = 10;
  cfg.background_fraction = 0.0;
  double in = 0, out = 0;
  long n_in = 0, n_out = 0;
  for (const auto& s : generate_synthetic(cfg)) {
    for (std::size_t i = 0; i < s.mask.classes.size(); ++i) {
      if (s.mask.classes.values()[i]) {
        in += s.image.pixels.values()[i];
        ++n_in;
      } else {
        out += s.image.pixels.values()[i];
        ++n_out;
      }
    }
  }
  CHECK(in / n_in > out / n_out);
}

TEST_CASE("PNG round trip and format rejection") {
  TempDir dir;
  Array2D<std::uint8_t> img(3, 4);
  for (int i = 0; i < 12; ++i) img.values()[i] = static_cast<std::uint8_t>(i * 20);
  write_png_gray(dir.path() / "g.png", img);
  CHECK(read_png(dir.path() / "g.png") == img);
  Array2D<std::uint8_t> mask(2, 2, std::vector<std::uint8_t>{0, 1, 1, 0});
  write_png_mask(dir.path() / "m.png", mask);
  CHECK(read_png(dir.path() / "m.png") == mask);
  CHECK_THROWS_AS(read_png(dir.path() / "absent.png"), LoadError);
  std::ofstream(dir.path() / "bad.png") << "not a png";
  CHECK_THROWS_AS(read_png(dir.path() / "bad.png"), LoadError);
  CHECK(encode_png_gray(img).size() > 8);
}

TEST_CASE("writing and reloading a synthetic dataset is exact") {
  TempDir dir;
  SyntheticConfig cfg;
  cfg.n_images = 3;
  cfg.height = 16;
  cfg.width = 12;
  const auto ds = synthetic_dataset(cfg);
  write_dataset(dir.path(), "tiny", ds.samples, ds.manifest.preprocessing);
  const auto back = load_manifest(dir.path());
  REQUIRE(back.samples.size() == 3);
  CHECK(back.manifest.name == "tiny");
  CHECK(back.manifest.preprocessing == ds.manifest.preprocessing);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.samples[i].image.id == ds.samples[i].image.id);
    CHECK(back.samples[i].image.scan_id == ds.samples[i].image.scan_id);
    CHECK(back.samples[i].image.pixels == ds.samples[i].image.pixels);
    REQUIRE(back.samples[i].mask);
    CHECK(back.samples[i].mask->classes == ds.samples[i].mask->classes);
  }
}

TEST_CASE("manifest errors name the offending entry") {
  TempDir dir;
  SyntheticConfig cfg;
  cfg.n_images = 3;
  cfg.height = 8;
  cfg.width = 8;
  auto ds = synthetic_dataset(cfg);
  ds.samples[2].mask.reset();
  write_dataset(dir.path(), "opt", ds.samples, ds.manifest.preprocessing);
  const auto loaded = load_manifest(dir.path() / "manifest.json");
  CHECK_FALSE(loaded.samples[2].mask.has_value());

  write_png_mask(dir.path() / "masks" / "synth00001.png", Array2D<std::uint8_t>(4, 8, 0));
  try {
    load_manifest(dir.path());
    FAIL("expected a load error");
  } catch (const LoadError& e) {
    CHECK(std::string(e.what()).find("synth00001") != std::string::npos);
  }
  std::filesystem::remove(dir.path() / "images" / "synth00000.png");
  CHECK_THROWS_AS(load_manifest(dir.path()), LoadError);
  CHECK_THROWS_AS(load_manifest(dir.path() / "nowhere"), LoadError);
}
