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

#include "ral/data/split.hpp"

#include <cmath>
#include <numeric>

#include "ral/data/errors.hpp"

namespace ral {

std::string_view to_string(SplitMode m) { return m == SplitMode::Mixed ? "mixed" : "separate"; }

SplitMode split_mode_from_string(std::string_view s) {
  if (s == "mixed" || s == "Mixed") return SplitMode::Mixed;
  if (s == "separate" || s == "Separate") return SplitMode::Separate;
  throw InvalidArgument("unknown split mode: " + std::string(s));
}

namespace {

// floor(f * n) with a small tolerance so 0.45 * 20 lands on 9, not 8.
std::size_t prefix_boundary(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

DatasetSplit split_mixed(const std::vector<ScanSlices>& scans, const std::array<double, 3>& f) {
  for (double x : f) {
    if (x < 0.0) throw InvalidArgument("make_split: negative fraction");
  }
  if (std::abs(f[0] + f[1] + f[2] - 1.0) > 1e-9) {
    throw InvalidArgument("make_split: fractions must sum to 1");
  }
  DatasetSplit out;
  out.mode = SplitMode::Mixed;
  for (const auto& scan : scans) {
    const std::size_t n = scan.slice_ids.size();
    const std::size_t b1 = prefix_boundary(f[0], n);
    const std::size_t b2 = std::max(b1, prefix_boundary(f[0] + f[1], n));
    for (std::size_t i = 0; i < n; ++i) {
      auto& dst = i < b1 ? out.train : (i < b2 ? out.val : out.test);
      dst.push_back(scan.slice_ids[i]);
    }
  }
  return out;
}

DatasetSplit split_separate(const std::vector<ScanSlices>& scans, const std::array<int, 3>& counts) {
  if (scans.size() < 3) {
    throw InvalidArgument("make_split: separate mode needs at least 3 scans, got " + std::to_string(scans.size()));
  }
  for (int c : counts) {
    if (c < 1) throw InvalidArgument("make_split: every split needs at least one scan");
  }
  if (static_cast<std::size_t>(counts[0] + counts[1] + counts[2]) != scans.size()) {
    throw InvalidArgument("make_split: scan counts must sum to the number of scans");
  }
  DatasetSplit out;
  out.mode = SplitMode::Separate;
  std::size_t s = 0;
  for (int part = 0; part < 3; ++part) {
    auto& dst = part == 0 ? out.train : (part == 1 ? out.val : out.test);
    for (int i = 0; i < counts[part]; ++i, ++s) {
      dst.insert(dst.end(), scans[s].slice_ids.begin(), scans[s].slice_ids.end());
    }
  }
  return out;
}

}  // namespace

DatasetSplit make_split(const std::vector<ScanSlices>& scans, const SplitSpec& spec) {
  if (scans.empty()) {
    throw InvalidArgument("make_split: no scans");
  }
  DatasetSplit out = spec.mode == SplitMode::Mixed ? split_mixed(scans, spec.fractions)
                                                   : split_separate(scans, spec.counts);
  if (out.train.empty() || out.val.empty() || out.test.empty()) {
    throw InvalidArgument("make_split: too few slices to give every split at least one element");
  }
  return out;
}

}  // namespace ral
