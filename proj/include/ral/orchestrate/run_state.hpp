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
#include <map>
#include <string>
#include <vector>

#include "ral/data/grid.hpp"
#include "ral/data/image.hpp"
#include "ral/eval/curves.hpp"
#include "ral/ingest/manifest.hpp"
#include "ral/oracle/ledger.hpp"
#include "ral/oracle/oracle.hpp"

namespace ral::orchestrate {

/// Label state of one training-pool image.
struct ImageRecord {
  const ingest::Sample* sample = nullptr;
  PartialLabelMask labels;
  std::vector<RegionState> regions;

  const std::string& id() const { return sample->image.id; }
  int labeled_regions() const;
  bool complete() const { return labeled_regions() == static_cast<int>(regions.size()); }
};

/// Image pools derived from region states: X_l holds fully labeled images,
/// X_p partially labeled ones, X_u untouched ones.
struct PoolSizes {
  int labeled_images = 0;
  int partial_images = 0;
  int unlabeled_images = 0;
  std::int64_t labeled_pool_regions = 0;
  std::int64_t partial_pool_regions = 0;
  std::int64_t unlabeled_pool_regions = 0;

  std::int64_t total_regions() const noexcept {
    return labeled_pool_regions + partial_pool_regions + unlabeled_pool_regions;
  }
};

class RunState {
 public:
  /// `train_ids` must name samples of `dataset`; every one needs the grid's
  /// image size.
  RunState(const ingest::Dataset& dataset, const std::vector<std::string>& train_ids, RegionGrid grid);

  RunState(const RunState&) = delete;
  RunState& operator=(const RunState&) = delete;
  RunState(RunState&&) = default;
  RunState& operator=(RunState&&) = default;

  const RegionGrid& grid() const noexcept { return grid_; }
  const std::vector<ImageRecord>& images() const noexcept { return images_; }
  const ImageRecord& image(const std::string& image_id) const;
  bool contains(const std::string& image_id) const { return index_.count(image_id) != 0; }

  const oracle::BudgetLedger& ledger() const noexcept { return ledger_; }
  const std::vector<eval::CurvePoint>& curve() const noexcept { return curve_; }
  void add_curve_point(const eval::CurvePoint& p) { curve_.push_back(p); }

  int cycle = 0;

  /// Applies the label delta and charges its actions. A delta with region
  /// index -1 labels the whole slice and marks every region PixelLabeled.
  /// Action timestamps are set to the ledger total after the action, a
  /// logical clock that makes ledgers replayable byte for byte.
  std::vector<oracle::AnnotationAction> record(oracle::Annotation annotation);

  /// Same, keeping the caller's timestamps (human sessions).
  void record_timestamped(const oracle::Annotation& annotation);

  std::int64_t total_regions() const noexcept;
  std::int64_t regions_labeled() const noexcept;
  PoolSizes pools() const;

  /// Region states per image id, for replay comparison.
  std::map<std::string, std::vector<RegionState>> region_states() const;
  /// Label masks per image id.
  std::map<std::string, PartialLabelMask> label_masks() const;

 private:
  ImageRecord& mutable_image(const std::string& image_id);
  void apply_delta(const oracle::LabelDelta& delta);

  RegionGrid grid_;
  std::vector<ImageRecord> images_;
  std::map<std::string, std::size_t> index_;
  oracle::BudgetLedger ledger_;
  std::vector<eval::CurvePoint> curve_;
};

}  // namespace ral::orchestrate
