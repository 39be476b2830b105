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
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ral/acquisition/acquisition.hpp"
#include "ral/data/split.hpp"
#include "ral/eval/curves.hpp"
#include "ral/ingest/manifest.hpp"
#include "ral/nn/predictor.hpp"
#include "ral/orchestrate/config.hpp"
#include "ral/orchestrate/run_state.hpp"

namespace ral::orchestrate {

/// Dataset, split and grid for a config. Validation and test slices always
/// need ground-truth masks; training slices need them when the simulated
/// oracle labels them.
struct Workspace {
  ingest::Dataset dataset;
  DatasetSplit split;
  RegionGrid grid;
};

Workspace prepare_workspace(const RunConfig& config, bool simulated_oracle = true);

/// Seeds of the independent random streams of a run.
namespace streams {
std::uint64_t init(const RunConfig& config);
std::uint64_t seed_pick(const RunConfig& config);
std::uint64_t oracle(const RunConfig& config);
std::uint64_t select(const RunConfig& config);
std::uint64_t train(const RunConfig& config, int cycle);
std::uint64_t mc(const RunConfig& config, int cycle);
}  // namespace streams

struct TestScore {
  double dice = 0.0;
  std::optional<double> specificity;  // empty when the split has no negatives
};

/// Micro-aggregated scores of argmax predictions over the given slices.
TestScore evaluate(const nn::Predictor& predictor, const ingest::Dataset& dataset,
                   const std::vector<std::string>& image_ids);

/// Per-cycle record; test Dice of the trained checkpoint plus its best
/// validation Dice.
struct CycleRecord {
  eval::CurvePoint point;
  std::optional<double> val_dice;
  int best_epoch = 0;
  int epochs_run = 0;
  int selected = 0;
};

std::string to_json_line(const CycleRecord& r);
/// Inverse of to_json_line; the tags come from `config`.
CycleRecord cycle_record_from_json(std::string_view line, const RunConfig& config);

struct RunOptions {
  bool write_outputs = true;
  std::function<void(const std::string&)> log;
};

struct RunResult {
  std::string run_id;
  std::filesystem::path run_dir;
  std::filesystem::path curve_path;
  std::vector<eval::CurvePoint> curve;
  std::vector<CycleRecord> cycles;
  std::vector<acquisition::SelectionLogEntry> selections;
  oracle::BudgetLedger ledger;
  std::map<std::string, std::vector<RegionState>> region_states;
  std::map<std::string, PartialLabelMask> labels;
  PoolSizes final_pools;
  bool exhausted = false;
};

/// Seed phase, then cycles of train, evaluate, score, select and annotate.
/// Outputs land in <output_dir>/<run-id>/ (config.json, selection.jsonl,
/// ledger.jsonl, cycles.jsonl, label_state.json, model.json) and
/// <output_dir>/curves/<run-id>.csv.
RunResult run(const RunConfig& config, const RunOptions& options = {});

/// The n training images with the smallest seeded keys.
std::vector<std::string> pick_seed_images(const std::vector<std::string>& train_ids, int n, std::uint64_t seed);

/// Seed-phase selections: every region of each image, or one whole-slice
/// entry (region index -1) when per-pixel seed labels are priced per slice.
std::vector<acquisition::SelectionLogEntry> seed_entries(const RunConfig& config,
                                                         const std::vector<std::string>& image_ids);

/// Labels selections through the simulated oracle. Click positions depend
/// only on (run seed, image, region), so replaying a log reproduces them.
std::vector<oracle::AnnotationAction> label_selections(const RunConfig& config, RunState& state,
                                                       std::span<const acquisition::SelectionLogEntry> entries,
                                                       int cycle);

struct ReplayResult {
  RunConfig config;
  oracle::BudgetLedger ledger;
  std::map<std::string, std::vector<RegionState>> region_states;
  std::map<std::string, PartialLabelMask> labels;
};

/// Re-labels a selection log without consulting any model.
ReplayResult replay(const RunConfig& config, std::span<const acquisition::SelectionLogEntry> entries);

/// Replays <run-dir>/selection.jsonl using the config.json beside it.
ReplayResult replay(const std::filesystem::path& selection_log);

/// Replays a run directory's log and compares against its ledger.jsonl and
/// label_state.json. Returns one message per mismatch; empty means equal.
std::vector<std::string> verify_replay(const std::filesystem::path& selection_log, ReplayResult* result = nullptr);

/// FNV-1a over the raw label bytes.
std::uint64_t label_digest(const PartialLabelMask& labels);

}  // namespace ral::orchestrate
