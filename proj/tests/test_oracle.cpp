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
#include <map>
#include <random>
#include <set>

#include "ral/oracle/components.hpp"
#include "ral/oracle/ledger.hpp"
#include "ral/oracle/oracle.hpp"
#include "ral/oracle/polygon.hpp"
#include "temp_dir.hpp"

using namespace ral;
using namespace ral::oracle;

namespace {

Array2D<std::uint8_t> rect_mask(int h, int w, int r0, int c0, int rh, int rw) {
  Array2D<std::uint8_t> m(h, w, 0);
  for (int r = r0; r < r0 + rh; ++r) {
    for (int c = c0; c < c0 + rw; ++c) m(r, c) = 1;
  }
  return m;
}

Array2D<std::uint8_t> disk(int radius) {
  const int n = 2 * radius + 1;
  Array2D<std::uint8_t> m(n, n, 0);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const int dr = r - radius, dc = c - radius;
      m(r, c) = dr * dr + dc * dc <= radius * radius;
    }
  }
  return m;
}

// Independent vertex counter: gathers every boundary unit edge, chains them
// by endpoint lookup, drops collinear points, then simplifies with an
// explicit work stack instead of recursion. Only valid for shapes without
// diagonal-only contacts, which is all it is used on.
int brute_force_vertex_count(const Array2D<std::uint8_t>& m, double eps) {
  auto on = [&](int r, int c) { return r >= 0 && c >= 0 && r < m.rows() && c < m.cols() && m(r, c) != 0; };
  using P = std::pair<int, int>;  // (x, y) corner
  std::map<P, P> next;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (!on(r, c)) continue;
      if (!on(r - 1, c)) next[{c, r}] = {c + 1, r};
      if (!on(r, c + 1)) next[{c + 1, r}] = {c + 1, r + 1};
      if (!on(r + 1, c)) next[{c + 1, r + 1}] = {c, r + 1};
      if (!on(r, c - 1)) next[{c, r + 1}] = {c, r};
    }
  }
  P start{-1, -1};
  for (int r = 0; r < m.rows() && start.first < 0; ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (on(r, c)) {
        start = {c, r};
        break;
      }
    }
  }
  std::vector<P> chain{start};
  for (P p = next.at(start); p != start; p = next.at(p)) chain.push_back(p);
  std::vector<P> corners;
  const std::size_t n = chain.size();
  for (std::size_t i = 0; i < n; ++i) {
    const P& a = chain[(i + n - 1) % n];
    const P& b = chain[i];
    const P& c = chain[(i + 1) % n];
    const int cross = (b.first - a.first) * (c.second - b.second) - (b.second - a.second) * (c.first - b.first);
    if (cross != 0) corners.push_back(b);
  }
  const std::size_t k = corners.size();
  auto dist = [](const P& p, const P& a, const P& b) {
    const double vx = b.first - a.first, vy = b.second - a.second;
    const double wx = p.first - a.first, wy = p.second - a.second;
    const double l2 = vx * vx + vy * vy;
    double t = l2 == 0 ? 0 : (wx * vx + wy * vy) / l2;
    t = t < 0 ? 0 : (t > 1 ? 1 : t);
    return std::sqrt((wx - t * vx) * (wx - t * vx) + (wy - t * vy) * (wy - t * vy));
  };
  std::size_t far = 0;
  double best = -1;
  for (std::size_t i = 1; i < k; ++i) {
    const double d = std::hypot(corners[i].first - corners[0].first, corners[i].second - corners[0].second);
    if (d > best) {
      best = d;
      far = i;
    }
  }
  std::vector<P> ring(corners);
  ring.push_back(corners[0]);
  std::vector<bool> keep(ring.size(), false);
  keep[0] = keep[far] = keep[k] = true;
  std::vector<std::pair<std::size_t, std::size_t>> work{{0, far}, {far, k}};
  while (!work.empty()) {
    const auto [lo, hi] = work.back();
    work.pop_back();
    double dmax = -1;
    std::size_t idx = lo;
    for (std::size_t i = lo + 1; i < hi; ++i) {
      const double d = dist(ring[i], ring[lo], ring[hi]);
      if (d > dmax) {
        dmax = d;
        idx = i;
      }
    }
    if (dmax > eps) {
      keep[idx] = true;
      work.push_back({lo, idx});
      work.push_back({idx, hi});
    }
  }
  int count = 0;
  for (std::size_t i = 0; i < k; ++i) count += keep[i];
  return count < 3 ? 4 : count;
}

}  // namespace

TEST_CASE("8-connected components") {
  Array2D<std::uint8_t> m(4, 4, std::vector<std::uint8_t>{1, 0, 0, 1,  //
                                                         0, 1, 0, 0,  //
                                                         0, 0, 0, 0,  //
                                                         1, 1, 0, 1});
  const auto comps = connected_components(m);
  REQUIRE(comps.size() == 4);
  CHECK(comps[0].size() == 2);
  CHECK(comps[1] == std::vector<Pixel>{{0, 3}});
  CHECK(comps[2].size() == 2);
  const auto clipped = connected_components(m, Rect{0, 0, 2, 2});
  REQUIRE(clipped.size() == 1);
  CHECK(clipped[0].size() == 2);
  CHECK_THROWS_AS(connected_components(m, Rect{2, 2, 3, 3}), InvalidArgument);
}

TEST_CASE("polygon vertex count of rectangles is four at any size and offset") {
  for (int h = 1; h <= 9; ++h) {
    for (int w = 1; w <= 9; ++w) {
      for (int off = 0; off < 3; ++off) {
        const auto m = rect_mask(16, 16, off, 2 * off, h, w);
        CHECK(polygon_vertex_count(m) == 4);
      }
    }
  }
  CHECK(polygon_vertex_count(rect_mask(6, 10, 0, 0, 6, 10)) == 4);
  CHECK(polygon_vertex_count(rect_mask(1, 1, 0, 0, 1, 1)) == 4);
}

TEST_CASE("polygon of a single pixel is its unit square") {
  const auto ring = trace_outer_boundary(rect_mask(3, 3, 1, 1, 1, 1));
  CHECK(ring == std::vector<LatticePoint>{{1, 1}, {2, 1}, {2, 2}, {1, 2}});
  CHECK(polygon_vertex_count(rect_mask(3, 3, 1, 1, 1, 1)) == 4);
}

TEST_CASE("diagonal contacts stay in one outline") {
  Array2D<std::uint8_t> m(2, 2, std::vector<std::uint8_t>{1, 0, 0, 1});
  const auto ring = trace_outer_boundary(m);
  CHECK(ring.size() == 8);
  CHECK(polygon_vertex_count(m) >= 3);
}

TEST_CASE("outline ignores holes") {
  auto m = rect_mask(7, 7, 0, 0, 7, 7);
  m(3, 3) = 0;
  CHECK(trace_outer_boundary(m).size() == 4);
  CHECK(polygon_vertex_count(m) == 4);
}

TEST_CASE("radius-8 disk matches the brute-force simplifier") {
  const auto d = disk(8);
  const int oracle = brute_force_vertex_count(d, 1.0);
  CHECK(polygon_vertex_count(d) == oracle);
  CHECK(oracle == 8);
}

TEST_CASE("vertex count agrees with brute force on random blobs and is translation invariant") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    // Grow a 4-connected blob so it has no diagonal-only contacts.
    Array2D<std::uint8_t> m(14, 14, 0);
    int r = 7, c = 7;
    for (int step = 0; step < 30; ++step) {
      m(r, c) = 1;
      const int d = static_cast<int>(rng() % 4);
      r = std::clamp(r + (d == 0) - (d == 1), 1, 12);
      c = std::clamp(c + (d == 2) - (d == 3), 1, 12);
    }
    // Fill diagonal-only contacts.
    for (int y = 0; y + 1 < 14; ++y) {
      for (int x = 0; x + 1 < 14; ++x) {
        if (m(y, x) && m(y + 1, x + 1) && !m(y, x + 1) && !m(y + 1, x)) m(y, x + 1) = 1;
        if (m(y, x + 1) && m(y + 1, x) && !m(y, x) && !m(y + 1, x + 1)) m(y, x) = 1;
      }
    }
    const int v = polygon_vertex_count(m);
    CHECK(v == brute_force_vertex_count(m, 1.0));
    Array2D<std::uint8_t> shifted(20, 20, 0);
    for (int y = 0; y < 14; ++y) {
      for (int x = 0; x < 14; ++x) shifted(y + 5, x + 3) = m(y, x);
    }
    CHECK(polygon_vertex_count(shifted) == v);
  }
}

TEST_CASE("polygon errors") {
  CHECK_THROWS_AS(polygon_vertex_count(Array2D<std::uint8_t>(3, 3, 0)), InvalidArgument);
  Array2D<std::uint8_t> two(1, 3, std::vector<std::uint8_t>{1, 0, 1});
  CHECK_THROWS_AS(polygon_vertex_count(two), InvalidArgument);
}

namespace {

GroundTruthMask gt_from(Array2D<std::uint8_t> m) { return {"img", std::move(m)}; }

}  // namespace

TEST_CASE("point annotation") {
  const auto grid = build_grid(16, 16, 4);  // 8x8 regions
  Array2D<std::uint8_t> m(16, 16, 0);
  for (int r = 1; r < 3; ++r) {
    for (int c = 1; c < 3; ++c) m(r, c) = 1;  // region 0, component A
  }
  m(6, 6) = 1;                                 // region 0, component B
  for (int r = 2; r < 5; ++r) m(r, 10) = 1;    // region 1, one component
  const auto gt = gt_from(m);

  const auto bg = annotate_point(grid, {"img", 3, RegionState::Unlabeled}, gt, 1, 0);
  CHECK(bg.delta.state == RegionState::BackgroundTagged);
  CHECK(bg.delta.pixels.size() == 64);
  REQUIRE(bg.actions.size() == 1);
  CHECK(bg.actions[0].kind == ActionKind::BackgroundTag);
  CHECK(bg.cost_ms() == 3000);

  const auto one = annotate_point(grid, {"img", 1, RegionState::Unlabeled}, gt, 1, 0);
  CHECK(one.delta.state == RegionState::PointLabeled);
  REQUIRE(one.delta.pixels.size() == 1);
  CHECK(gt.classes(one.delta.pixels[0].first.row, one.delta.pixels[0].first.col) == 1);
  CHECK(one.cost_ms() == 3000);

  const auto two = annotate_point(grid, {"img", 0, RegionState::Unlabeled}, gt, 1, 0);
  CHECK(two.delta.pixels.size() == 2);
  CHECK(two.cost_ms() == 6000);
  CHECK(two.actions.size() == 2);

  CHECK_THROWS_AS(annotate_point(grid, {"img", 0, RegionState::PointLabeled}, gt, 1, 0), InvalidState);
  CHECK(annotate_point(grid, {"img", 0, RegionState::Unlabeled}, gt, 1, 0).delta.pixels ==
        two.delta.pixels);
}

TEST_CASE("point annotation is truthful and covers every component") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    Array2D<std::uint8_t> m(24, 24, 0);
    for (auto& v : m.values()) v = rng() % 7 == 0;
    const auto gt = gt_from(m);
    const auto grid = build_grid(24, 24, 9);
    auto labels = PartialLabelMask::unlabeled("img", 24, 24);
    std::vector<RegionState> states(9, RegionState::Unlabeled);
    for (int i = 0; i < 9; ++i) {
      const auto a = annotate_point(grid, {"img", i, RegionState::Unlabeled}, gt, trial, 0);
      for (const auto& [p, v] : a.delta.pixels) CHECK(static_cast<int>(gt.classes(p.row, p.col)) == v);
      apply(a.delta, labels, states[i]);
    }
    for (const auto& comp : connected_components(m)) {
      bool hit = false;
      for (const auto& p : comp) hit = hit || labels.labels(p.row, p.col) == 1;
      CHECK(hit);
    }
    CHECK_THROWS_AS(apply(annotate_point(grid, {"img", 0, RegionState::Unlabeled}, gt, 0, 0).delta, labels,
                          states[0]),
                    InvalidState);
  }
}

TEST_CASE("full annotation cost") {
  const auto grid = build_grid(16, 16, 4);
  Array2D<std::uint8_t> m(16, 16, 0);
  for (int r = 1; r < 4; ++r) {
    for (int c = 9; c < 14; ++c) m(r, c) = 1;
  }
  const auto gt = gt_from(m);
  const auto bg = annotate_full(grid, {"img", 0, RegionState::Unlabeled}, gt, 2);
  CHECK(bg.cost_ms() == 3000);
  CHECK(bg.delta.state == RegionState::PixelLabeled);
  const auto rect = annotate_full(grid, {"img", 1, RegionState::Unlabeled}, gt, 2);
  CHECK(rect.cost_ms() == 12000);
  CHECK(rect.actions[0].vertices == 4);
  CHECK(rect.delta.pixels.size() == 64);

  CostModel expert;
  expert.full_label = FullLabelCost::ExpertSlice;
  CHECK(annotate_full_slice(gt, 0, expert).cost_ms() == 96000);
  CHECK(annotate_full_slice(gt, 0).cost_ms() == 12000);
}

TEST_CASE("manual annotations") {
  const auto grid = build_grid(16, 16, 4);
  const RegionRef r{"img", 1, RegionState::Unlabeled};
  const std::vector<Pixel> pts{{2, 9}, {5, 12}};
  const auto a = manual_points(grid, r, pts, 4);
  CHECK(a.cost_ms() == 6000);
  CHECK(a.delta.state == RegionState::PointLabeled);
  const std::vector<Pixel> outside{{-1, 0}};
  CHECK_THROWS_AS(manual_points(grid, r, outside, 4), InvalidArgument);
  const auto b = manual_background(grid, r, 4);
  CHECK(b.cost_ms() == 3000);
  CHECK(b.delta.pixels.size() == 64);
}

TEST_CASE("scenario cost") {
  CHECK(scenario_cost(5, 64, 100, 5, 3) == 2460.0);
  CHECK(scenario_cost(5, 64, 0, 5, 3) == 960.0);
  CHECK(scenario_cost(0, 64, 0, 5, 3) == 0.0);
  CHECK(scenario_cost_ms(5, 64, 100, 5, 3000) == 2460000);
}

TEST_CASE("ledger is exact and replays bit for bit") {
  TempDir dir;
  const auto grid = build_grid(16, 16, 4);
  Array2D<std::uint8_t> m(16, 16, 0);
  m(1, 1) = 1;
  m(3, 5) = 1;
  const auto gt = gt_from(m);
  BudgetLedger ledger;
  std::int64_t expected = 0;
  for (int i = 0; i < 4; ++i) {
    auto a = annotate_point(grid, {"img", i, RegionState::Unlabeled}, gt, 3, i);
    for (auto& act : a.actions) act.timestamp_ms = 1000 * i;
    ledger.append(a.actions);
    append_ledger_file(dir.path() / "ledger.jsonl", a.actions);
    expected += a.cost_ms();
  }
  CHECK(ledger.total_ms() == expected);
  CHECK(ledger.total_ms() == 5 * 3000);
  CHECK(ledger.count(ActionKind::PointLabel) == 2);
  CHECK(ledger.count(ActionKind::BackgroundTag) == 3);
  const auto back = replay_ledger(dir.path() / "ledger.jsonl");
  CHECK(back == ledger);
  write_ledger_file(dir.path() / "copy.jsonl", ledger);
  CHECK(replay_ledger(dir.path() / "copy.jsonl") == ledger);
  AnnotationAction free_action;
  CHECK_THROWS_AS(ledger.append(free_action), InvalidArgument);
  CHECK_THROWS_AS(action_from_json("{\"kind\":\"teleport\"}"), LoadError);
}
