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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ral/data/grid.hpp"
#include "ral/uncertainty/uncertainty.hpp"

namespace ral::acquisition {

enum class Aggregation { Mean, Max };
enum class Heuristic { Random, Entropy };

std::string_view to_string(Aggregation a);
std::string_view to_string(Heuristic h);
Aggregation aggregation_from_string(std::string_view s);
Heuristic heuristic_from_string(std::string_view s);

struct RegionScore {
  RegionRef region;
  double score = 0.0;
  Aggregation aggregation = Aggregation::Max;
};

/// One score per Unlabeled region (row-major order); labeled regions are
/// skipped. `states` is indexed by region index.
std::vector<RegionScore> score_regions(const uncertainty::EntropyMap& entropy, const RegionGrid& grid,
                                       std::span<const RegionState> states, Aggregation aggregation);

struct ImageRank {
  std::string image_id;
  double score = 0.0;  // best region score of the image
};

/// Images by descending best region score, ties by ascending image id.
/// Images without scored regions are left out.
std::vector<ImageRank> rank_images(std::span<const std::vector<RegionScore>> per_image);

struct SelectionRequest {
  Heuristic heuristic = Heuristic::Entropy;
  Aggregation aggregation = Aggregation::Max;
  int images_per_cycle = 5;
  int regions_per_image = 1;
  int cycle = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// An image that still has Unlabeled regions. `entropy` is required for the
/// Entropy heuristic and ignored by Random.
struct Candidate {
  std::string image_id;
  const RegionGrid* grid = nullptr;
  std::span<const RegionState> states;
  const uncertainty::EntropyMap* entropy = nullptr;
};

struct Selection {
  RegionRef region;
  double score = 0.0;

  friend bool operator==(const Selection&, const Selection&) = default;
};

/// Random priority of a region in a given cycle. Keys are independent of
/// which other regions are still unlabeled, so picking the smallest keys is
/// a uniform sample without replacement.
std::uint64_t random_key(std::uint64_t seed, int cycle, std::string_view image_id, int region_index);

/// Entropy: the top images_per_cycle images by rank_images and their best
/// regions_per_image regions (ties by region index). Random: the
/// images_per_cycle * regions_per_image Unlabeled regions with the smallest
/// random keys, scored 1 - to_unit(key). Returns fewer when candidates run
/// out; never duplicates or labeled regions.
std::vector<Selection> select(const SelectionRequest& request, std::span<const Candidate> candidates);

/// Every Unlabeled region ordered as select() would take them (descending
/// score for Entropy, ascending random key for Random).
std::vector<Selection> rank_all_regions(const SelectionRequest& request, std::span<const Candidate> candidates);

/// One line of the selection log.
struct SelectionLogEntry {
  int cycle = 0;
  std::string heuristic;  // "entropy", "random" or "seed"
  std::string image_id;
  int region_index = 0;
  double score = 0.0;
  std::string aggregation;
  std::uint64_t seed = 0;

  friend bool operator==(const SelectionLogEntry&, const SelectionLogEntry&) = default;
};

std::string to_json_line(const SelectionLogEntry& e);
SelectionLogEntry selection_entry_from_json(std::string_view line);
std::vector<SelectionLogEntry> read_selection_log(const std::filesystem::path& path);

}  // namespace ral::acquisition
