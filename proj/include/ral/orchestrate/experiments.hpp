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
#include <vector>

#include "ral/eval/curves.hpp"
#include "ral/orchestrate/config.hpp"
#include "ral/orchestrate/runner.hpp"

namespace ral::orchestrate {

/// Experiment run ids are "<prefix>-<variant>-s<seed>"; the prefix is the
/// base config's run_id, or the experiment name when that is empty.
std::string experiment_prefix(const RunConfig& base, const std::string& experiment);

// Random vs Entropy on identical configs.

struct HeuristicsRow {
  std::uint64_t seed = 0;
  double auc_random = 0.0;
  double auc_entropy = 0.0;
  double final_dice_random = 0.0;
  double final_dice_entropy = 0.0;

  double delta_auc() const noexcept { return auc_entropy - auc_random; }
  double delta_final_dice() const noexcept { return final_dice_entropy - final_dice_random; }
};

struct HeuristicsReport {
  std::vector<RunResult> runs;  // random then entropy for each seed
  std::vector<HeuristicsRow> rows;
  std::filesystem::path summary_csv;

  int entropy_auc_wins() const noexcept;
  double mean_final_dice_delta() const noexcept;
};

inline constexpr const char* kHeuristicsHeader =
    "seed,auc_random,auc_entropy,delta_auc,final_dice_random,final_dice_entropy,delta_final_dice";

HeuristicsReport experiment_heuristics(const RunConfig& base, std::span<const std::uint64_t> seeds,
                                       const RunOptions& options = {});

// Region size under a fixed seed-phase budget.

/// floor(budget / (k * click)).
int seed_images_for_budget(double budget_seconds, int k, std::int64_t click_ms);

struct RegionSizeRow {
  std::uint64_t seed = 0;
  int k = 0;
  int seed_images = 0;
  int regions_labeled = 0;
  double final_cost_seconds = 0.0;
  double final_dice = 0.0;
  double auc = 0.0;
};

struct RegionSizeReport {
  std::vector<RunResult> runs;
  std::vector<RegionSizeRow> rows;
  std::filesystem::path summary_csv;
};

inline constexpr const char* kRegionSizeHeader = "seed,k,seed_images,regions_labeled,final_cost_seconds,final_dice,auc";

/// One run per (seed, k) with k from base.experiments.region_sizes; needs
/// base.experiments.seed_budget_seconds.
RegionSizeReport experiment_region_size(const RunConfig& base, std::span<const std::uint64_t> seeds,
                                        const RunOptions& options = {});

// Point-level vs per-pixel supervision on a cost axis.

struct SupervisionRow {
  double cost_seconds = 0.0;
  std::string scheme;
  std::uint64_t seed = 0;
  int cycle = 0;
  int regions_labeled = 0;
  double dice = 0.0;
};

/// Checkpoints are the row costs of either curve that both curves have
/// reached, up to `fraction` of the larger final cost (the total budget the
/// pair spans). Each curve is read as a step function of cost.
struct CheckpointComparison {
  std::vector<std::int64_t> checkpoints_ms;
  int point_wins = 0;  // checkpoints where point Dice >= pixel Dice

  bool point_dominates() const noexcept {
    return !checkpoints_ms.empty() && point_wins == static_cast<int>(checkpoints_ms.size());
  }
};

CheckpointComparison compare_on_cost(const std::vector<eval::CurvePoint>& point,
                                     const std::vector<eval::CurvePoint>& pixel, double fraction = 0.5);

struct SupervisionReport {
  std::vector<RunResult> runs;  // point then pixel for each seed
  std::vector<SupervisionRow> rows;  // sorted by cost
  std::vector<CheckpointComparison> comparisons;  // per seed
  std::filesystem::path comparison_csv;
  std::filesystem::path checkpoint_csv;

  int seeds_point_dominates() const noexcept;
};

inline constexpr const char* kSupervisionHeader = "cost_seconds,scheme,seed,cycle,regions_labeled,dice";

SupervisionReport experiment_supervision(const RunConfig& base, std::span<const std::uint64_t> seeds,
                                         const RunOptions& options = {});

}  // namespace ral::orchestrate
