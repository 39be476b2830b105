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

#include "ral/orchestrate/run_state.hpp"

#include <algorithm>
#include <utility>

#include "ral/data/errors.hpp"

namespace ral::orchestrate {

int ImageRecord::labeled_regions() const {
  return static_cast<int>(std::count_if(regions.begin(), regions.end(), is_labeled));
}

RunState::RunState(const ingest::Dataset& dataset, const std::vector<std::string>& train_ids, RegionGrid grid)
    : grid_(grid) {
  images_.reserve(train_ids.size());
  for (const auto& id : train_ids) {
    const auto& sample = dataset.find(id);
    if (sample.image.height() != grid_.image_height() || sample.image.width() != grid_.image_width()) {
      throw InvalidArgument("image '" + id + "' does not match the region grid size");
    }
    if (index_.count(id)) throw InvalidArgument("duplicate training image '" + id + "'");
    index_[id] = images_.size();
    images_.push_back({&sample, PartialLabelMask::unlabeled(id, grid_.image_height(), grid_.image_width()),
                       std::vector<RegionState>(grid_.count(), RegionState::Unlabeled)});
  }
}

const ImageRecord& RunState::image(const std::string& image_id) const {
  auto it = index_.find(image_id);
  if (it == index_.end()) throw InvalidArgument("unknown image '" + image_id + "'");
  return images_[it->second];
}

ImageRecord& RunState::mutable_image(const std::string& image_id) {
  return const_cast<ImageRecord&>(std::as_const(*this).image(image_id));
}

void RunState::apply_delta(const oracle::LabelDelta& delta) {
  auto& rec = mutable_image(delta.image_id);
  if (delta.region_index >= 0) {
    if (delta.region_index >= grid_.count()) throw InvalidArgument("region index out of range");
    oracle::apply(delta, rec.labels, rec.regions[delta.region_index]);
    return;
  }
  for (auto s : rec.regions) {
    if (is_labeled(s)) throw InvalidState("slice '" + delta.image_id + "' already has labeled regions");
  }
  RegionState scratch = RegionState::Unlabeled;
  oracle::apply(delta, rec.labels, scratch);
  std::fill(rec.regions.begin(), rec.regions.end(), delta.state);
}

std::vector<oracle::AnnotationAction> RunState::record(oracle::Annotation annotation) {
  apply_delta(annotation.delta);
  std::int64_t clock = ledger_.total_ms();
  for (auto& a : annotation.actions) {
    clock += a.cost_ms;
    a.timestamp_ms = clock;
  }
  ledger_.append(annotation.actions);
  return std::move(annotation.actions);
}

void RunState::record_timestamped(const oracle::Annotation& annotation) {
  apply_delta(annotation.delta);
  ledger_.append(annotation.actions);
}

std::int64_t RunState::total_regions() const noexcept {
  return static_cast<std::int64_t>(images_.size()) * grid_.count();
}

std::int64_t RunState::regions_labeled() const noexcept {
  std::int64_t n = 0;
  for (const auto& rec : images_) n += rec.labeled_regions();
  return n;
}

PoolSizes RunState::pools() const {
  PoolSizes p;
  for (const auto& rec : images_) {
    const int labeled = rec.labeled_regions();
    const auto k = static_cast<std::int64_t>(rec.regions.size());
    if (labeled == 0) {
      ++p.unlabeled_images;
      p.unlabeled_pool_regions += k;
    } else if (labeled == k) {
      ++p.labeled_images;
      p.labeled_pool_regions += k;
    } else {
      ++p.partial_images;
      p.partial_pool_regions += k;
    }
  }
  return p;
}

std::map<std::string, std::vector<RegionState>> RunState::region_states() const {
  std::map<std::string, std::vector<RegionState>> out;
  for (const auto& rec : images_) out[rec.id()] = rec.regions;
  return out;
}

std::map<std::string, PartialLabelMask> RunState::label_masks() const {
  std::map<std::string, PartialLabelMask> out;
  for (const auto& rec : images_) out[rec.id()] = rec.labels;
  return out;
}

}  // namespace ral::orchestrate
