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

#include <random>
#include <set>

#include "ral/data/array.hpp"
#include "ral/data/grid.hpp"
#include "ral/data/image.hpp"
#include "ral/data/seed.hpp"
#include "ral/data/split.hpp"

using namespace ral;

TEST_CASE("build_grid on 352x352 with 64 regions gives 44 px squares") {
  const auto g = build_grid(352, 352, 64);
  CHECK(g.rows() == 8);
  CHECK(g.cols() == 8);
  for (int i = 0; i < g.count(); ++i) {
    CHECK(g.bounds(i).height == 44);
    CHECK(g.bounds(i).width == 44);
  }
  CHECK(region_bounds(g, 0) == Rect{0, 0, 44, 44});
  CHECK(region_bounds(g, 63) == Rect{308, 308, 44, 44});
}

TEST_CASE("build_grid even and uneven division") {
  const auto g = build_grid(4, 4, 4);
  CHECK(g.rows() == 2);
  for (int i = 0; i < 4; ++i) CHECK(g.bounds(i).area() == 4);

  const auto u = build_grid(5, 5, 4);
  CHECK(u.bounds(0) == Rect{0, 0, 2, 2});
  CHECK(u.bounds(1) == Rect{0, 2, 2, 3});
  CHECK(u.bounds(2) == Rect{2, 0, 3, 2});
  CHECK(u.bounds(3) == Rect{2, 2, 3, 3});

  const auto one = build_grid(7, 3, 1);
  CHECK(region_bounds(one, 0) == Rect{0, 0, 7, 3});
}

TEST_CASE("build_grid rejects bad region counts") {
  CHECK_THROWS_AS(build_grid(8, 8, 0), InvalidArgument);
  CHECK_THROWS_AS(build_grid(8, 8, 5), InvalidArgument);
  CHECK_THROWS_AS(build_grid(2, 2, 9), InvalidArgument);
  CHECK_THROWS_AS(build_grid(2, 2, 3, 1), InvalidArgument);
  CHECK_THROWS_AS(region_bounds(build_grid(4, 4, 4), 4), InvalidArgument);
  CHECK_THROWS_AS(region_bounds(build_grid(4, 4, 4), -1), InvalidArgument);
}

TEST_CASE("grid regions tile the image exactly") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    const int h = 1 + static_cast<int>(rng() % 23);
    const int w = 1 + static_cast<int>(rng() % 23);
    const int rows = 1 + static_cast<int>(rng() % h);
    const int cols = 1 + static_cast<int>(rng() % w);
    const RegionGrid g(h, w, rows, cols);
    Array2D<int> hits(h, w, 0);
    long area = 0;
    for (int i = 0; i < g.count(); ++i) {
      const Rect b = g.bounds(i);
      area += b.area();
      for (int r = b.row; r < b.row + b.height; ++r) {
        for (int c = b.col; c < b.col + b.width; ++c) {
          ++hits(r, c);
          CHECK(g.region_of(r, c) == i);
        }
      }
    }
    CHECK(area == static_cast<long>(h) * w);
    for (int v : hits.values()) CHECK(v == 1);
  }
}

TEST_CASE("region states only move forward") {
  RegionState s = RegionState::Unlabeled;
  transition(s, RegionState::PointLabeled);
  CHECK(s == RegionState::PointLabeled);
  CHECK_THROWS_AS(transition(s, RegionState::Unlabeled), InvalidState);
  CHECK_THROWS_AS(transition(s, RegionState::BackgroundTagged), InvalidState);
  for (auto st : {RegionState::Unlabeled, RegionState::PointLabeled, RegionState::BackgroundTagged,
                  RegionState::PixelLabeled}) {
    CHECK(region_state_from_string(to_string(st)) == st);
  }
}

namespace {

std::vector<ScanSlices> make_scans(int n_scans, int slices) {
  std::vector<ScanSlices> out;
  for (int s = 0; s < n_scans; ++s) {
    ScanSlices scan{"scan" + std::to_string(s), {}};
    for (int i = 0; i < slices; ++i) scan.slice_ids.push_back(scan.scan_id + "_" + std::to_string(i));
    out.push_back(scan);
  }
  return out;
}

}  // namespace

TEST_CASE("mixed split of 20 slices is 9/1/10") {
  const auto split = make_split(make_scans(1, 20), SplitSpec{});
  REQUIRE(split.train.size() == 9);
  REQUIRE(split.val.size() == 1);
  REQUIRE(split.test.size() == 10);
  CHECK(split.train.front() == "scan0_0");
  CHECK(split.train.back() == "scan0_8");
  CHECK(split.val.front() == "scan0_9");
  CHECK(split.test.front() == "scan0_10");
}

TEST_CASE("separate split assigns whole scans in order") {
  SplitSpec spec;
  spec.mode = SplitMode::Separate;
  const auto split = make_split(make_scans(9, 2), spec);
  CHECK(split.train.size() == 10);
  CHECK(split.train.back() == "scan4_1");
  CHECK(split.val == std::vector<std::string>{"scan5_0", "scan5_1"});
  CHECK(split.test.front() == "scan6_0");
  CHECK_THROWS_AS(make_split(make_scans(1, 20), spec), InvalidArgument);
}

TEST_CASE("split outputs are disjoint and exhaustive") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n_scans = 3 + static_cast<int>(rng() % 6);
    const int slices = 20 + static_cast<int>(rng() % 10);
    const auto scans = make_scans(n_scans, slices);
    SplitSpec spec;
    spec.mode = trial % 2 == 0 ? SplitMode::Mixed : SplitMode::Separate;
    const int val = 1, test = 1 + static_cast<int>(rng() % (n_scans - 2));
    spec.counts = {n_scans - val - test, val, test};
    if (spec.counts[0] < 1) continue;
    const auto split = make_split(scans, spec);
    std::set<std::string> seen;
    for (const auto* part : {&split.train, &split.val, &split.test}) {
      for (const auto& id : *part) CHECK(seen.insert(id).second);
    }
    CHECK(seen.size() == static_cast<std::size_t>(n_scans * slices));
    if (spec.mode == SplitMode::Separate) {
      auto scan_of = [](const std::string& id) { return id.substr(0, id.find('_')); };
      std::set<std::string> parts[3];
      for (const auto& id : split.train) parts[0].insert(scan_of(id));
      for (const auto& id : split.val) parts[1].insert(scan_of(id));
      for (const auto& id : split.test) parts[2].insert(scan_of(id));
      for (int a = 0; a < 3; ++a) {
        for (int b = a + 1; b < 3; ++b) {
          for (const auto& s : parts[a]) CHECK(parts[b].count(s) == 0);
        }
      }
    }
  }
}

TEST_CASE("argmax ties resolve to background") {
  ProbMap p(1, 2, 2, 0.5);
  p.at(0, 1, 1) = 0.6;
  p.at(0, 1, 0) = 0.4;
  const auto m = argmax_mask(p);
  CHECK(m(0, 0) == 0);
  CHECK(m(0, 1) == 1);
}

TEST_CASE("partial label mask helpers") {
  GroundTruthMask gt{"a", Array2D<std::uint8_t>(2, 2, std::vector<std::uint8_t>{0, 1, 1, 0})};
  const auto p = PartialLabelMask::from_ground_truth(gt);
  CHECK(p.labeled_count() == 4);
  CHECK(p.labels(0, 1) == 1);
  CHECK(PartialLabelMask::unlabeled("b", 3, 3).labeled_count() == 0);
  gt.classes(0, 0) = 2;
  CHECK_THROWS_AS(PartialLabelMask::from_ground_truth(gt), InvalidArgument);
}

TEST_CASE("seed derivation separates streams") {
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2}) == derive_seed(1, {2}));
  CHECK(to_unit(~0ULL) < 1.0);
  CHECK(to_unit(0) == 0.0);
}
