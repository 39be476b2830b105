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

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace ral {

enum class SplitMode { Mixed, Separate };

std::string_view to_string(SplitMode m);
SplitMode split_mode_from_string(std::string_view s);

struct ScanSlices {
  std::string scan_id;
  std::vector<std::string> slice_ids;  // in slice order
};

/// Mixed uses `fractions` (train, val, test) per scan; Separate assigns whole
/// scans in order using `counts`.
struct SplitSpec {
  SplitMode mode = SplitMode::Mixed;
  std::array<double, 3> fractions{0.45, 0.05, 0.50};
  std::array<int, 3> counts{5, 1, 3};
};

struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
  SplitMode mode = SplitMode::Mixed;
};

DatasetSplit make_split(const std::vector<ScanSlices>& scans, const SplitSpec& spec);

}  // namespace ral
