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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ral/acquisition/acquisition.hpp"
#include "ral/data/split.hpp"
#include "ral/ingest/synthetic.hpp"
#include "ral/nn/trainer.hpp"
#include "ral/oracle/oracle.hpp"

namespace ral::orchestrate {

enum class Supervision { PointLevel, PerPixel };

std::string_view to_string(Supervision s);
Supervision supervision_from_string(std::string_view s);

/// Either a dataset directory (manifest) or an in-memory synthetic set.
struct DatasetSource {
  std::optional<std::filesystem::path> manifest;
  ingest::SyntheticConfig synthetic;
};

/// Settings only the experiment drivers read.
struct ExperimentSettings {
  std::vector<int> region_sizes{16, 64, 256};
  std::optional<double> seed_budget_seconds;  // region-size study; required there
};

struct RunConfig {
  std::string run_id;  // empty: derived from the other fields
  DatasetSource dataset;
  SplitSpec split;
  int regions_per_image = 64;
  acquisition::Heuristic heuristic = acquisition::Heuristic::Entropy;
  acquisition::Aggregation aggregation = acquisition::Aggregation::Max;
  Supervision supervision = Supervision::PointLevel;
  int images_per_cycle = 5;
  int regions_per_selected_image = 1;
  int cycles = 100;
  std::optional<int> seed_images;  // defaults to images_per_cycle
  std::uint64_t seed = 0;
  nn::TrainConfig train;
  int mc_samples = 8;
  std::string model = "convnet";
  oracle::CostModel cost;
  std::filesystem::path output_dir = "runs";
  ExperimentSettings experiments;

  void validate() const;
  std::string resolved_run_id() const;
  int seed_image_count() const { return seed_images.value_or(images_per_cycle); }
};

/// Unknown keys are rejected so typos fail loudly.
RunConfig parse_run_config(std::string_view json_text);
std::string run_config_to_json(const RunConfig& config);

/// Reads a config file; a relative manifest path is taken relative to the
/// file's directory.
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace ral::orchestrate
