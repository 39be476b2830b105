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

// Experiment runner CLI: run, experiment, replay, synth.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ral/ingest/manifest.hpp"
#include "ral/orchestrate/config.hpp"
#include "ral/orchestrate/experiments.hpp"
#include "ral/orchestrate/runner.hpp"

namespace {

using namespace ral::orchestrate;

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const auto v = std::stoull(item, &used);
    if (used != item.size()) throw ral::InvalidArgument("bad seed '" + item + "'");
    seeds.push_back(v);
  }
  if (seeds.empty()) throw ral::InvalidArgument("--seeds needs at least one seed");
  return seeds;
}

RunOptions options(bool quiet) {
  RunOptions o;
  if (!quiet) o.log = [](const std::string& m) { std::cerr << m << '\n'; };
  return o;
}

RunConfig load(const std::string& path, const std::string& output_dir) {
  RunConfig c = load_run_config(path);
  if (!output_dir.empty()) c.output_dir = output_dir;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Region-based active learning for binary segmentation"};
  app.require_subcommand(1);

  std::string config_path, output_dir, seeds_text, log_path, synth_out;
  bool quiet = false;

  auto* run_cmd = app.add_subcommand("run", "Run one active-learning experiment");
  run_cmd->add_option("--config", config_path, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--output-dir", output_dir, "Override output_dir");
  run_cmd->add_flag("--quiet", quiet, "No per-cycle progress on stderr");

  auto* exp_cmd = app.add_subcommand("experiment", "Run a comparative study");
  std::string study;
  exp_cmd->add_option("study", study, "heuristics | region-size | supervision")
      ->required()
      ->check(CLI::IsMember({"heuristics", "region-size", "supervision"}));
  exp_cmd->add_option("--config", config_path, "Base run config (JSON)")->required()->check(CLI::ExistingFile);
  exp_cmd->add_option("--seeds", seeds_text, "Comma-separated seeds")->required();
  exp_cmd->add_option("--output-dir", output_dir, "Override output_dir");
  exp_cmd->add_flag("--quiet", quiet, "No per-cycle progress on stderr");

  auto* replay_cmd = app.add_subcommand("replay", "Replay a selection log and check it against the run's ledger");
  replay_cmd->add_option("--log", log_path, "selection.jsonl of a run directory")->required()->check(CLI::ExistingFile);

  auto* synth_cmd = app.add_subcommand("synth", "Write the synthetic dataset of a config to disk");
  synth_cmd->add_option("--config", config_path, "Run config (JSON) with a synthetic dataset")
      ->required()
      ->check(CLI::ExistingFile);
  synth_cmd->add_option("--out", synth_out, "Dataset directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const auto r = run(load(config_path, output_dir), options(quiet));
      std::cout << "run " << r.run_id << ": " << r.curve.size() << " curve rows, final dice " << r.curve.back().dice
                << ", cost " << r.ledger.total_seconds() << " s\n"
                << "curve: " << r.curve_path.string() << "\nrun dir: " << r.run_dir.string() << '\n';
    } else if (*exp_cmd) {
      const auto base = load(config_path, output_dir);
      const auto seeds = parse_seeds(seeds_text);
      if (study == "heuristics") {
        const auto rep = experiment_heuristics(base, seeds, options(quiet));
        std::cout << "entropy AUC wins: " << rep.entropy_auc_wins() << "/" << rep.rows.size()
                  << ", mean final dice delta: " << rep.mean_final_dice_delta() << '\n';
        std::cout << "summary: " << rep.summary_csv.string() << '\n';
      } else if (study == "region-size") {
        const auto rep = experiment_region_size(base, seeds, options(quiet));
        for (const auto& row : rep.rows) {
          std::cout << "seed " << row.seed << " k=" << row.k << " seed images " << row.seed_images << " final dice "
                    << row.final_dice << '\n';
        }
        std::cout << "summary: " << rep.summary_csv.string() << '\n';
      } else {
        const auto rep = experiment_supervision(base, seeds, options(quiet));
        std::cout << "point dominates on cost checkpoints in " << rep.seeds_point_dominates() << "/"
                  << rep.comparisons.size() << " seeds\n";
        std::cout << "comparison: " << rep.comparison_csv.string() << '\n';
      }
    } else if (*replay_cmd) {
      ReplayResult r;
      const auto problems = verify_replay(log_path, &r);
      if (!problems.empty()) {
        std::cerr << "error: replay mismatch: " << problems.front() << '\n';
        return 1;
      }
      std::int64_t labeled = 0;
      for (const auto& [id, states] : r.region_states) {
        for (auto s : states) labeled += ral::is_labeled(s) ? 1 : 0;
      }
      std::cout << "replay ok: " << r.ledger.size() << " actions, " << r.ledger.total_seconds() << " s, " << labeled
                << " regions labeled\n";
    } else if (*synth_cmd) {
      const auto c = load_run_config(config_path);
      if (c.dataset.manifest) throw ral::InvalidArgument("config names a manifest, not a synthetic dataset");
      const auto ds = ral::ingest::synthetic_dataset(c.dataset.synthetic);
      ral::ingest::write_dataset(synth_out, ds.manifest.name, ds.samples, ds.manifest.preprocessing);
      std::cout << "wrote " << ds.samples.size() << " slices to " << synth_out << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
