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

#include "ral/orchestrate/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ral/data/errors.hpp"
#include "ral/data/seed.hpp"
#include "ral/eval/metrics.hpp"
#include "ral/oracle/oracle.hpp"
#include "ral/uncertainty/uncertainty.hpp"

namespace ral::orchestrate {

using nlohmann::json;

namespace {

// Stream tags for derive_seed.
constexpr std::uint64_t kInitStream = 0x494e4954;
constexpr std::uint64_t kSeedPickStream = 0x5345454450;
constexpr std::uint64_t kOracleStream = 0x4f52434c;
constexpr std::uint64_t kSelectStream = 0x53454c;
constexpr std::uint64_t kTrainStream = 0x5452;
constexpr std::uint64_t kMcStream = 0x4d43;

void require_masks(const ingest::Dataset& ds, const std::vector<std::string>& ids, const char* split) {
  for (const auto& id : ids) {
    if (!ds.find(id).mask) {
      throw InvalidArgument(std::string("config: ") + split + " slice '" + id +
                            "' has no ground-truth mask; simulated runs need one");
    }
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw LoadError("cannot write " + tmp);
    out << text;
    if (!out) throw LoadError("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

void append_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw LoadError("cannot append to " + path.string());
  for (const auto& l : lines) out << l << '\n';
}

std::string label_state_json(const RunState& state) {
  json images = json::array();
  for (const auto& rec : state.images()) {
    json regions = json::array();
    for (auto s : rec.regions) regions.push_back(to_string(s));
    images.push_back({{"image_id", rec.id()}, {"regions", regions}, {"labels_digest", label_digest(rec.labels)}});
  }
  return json{{"images", images}}.dump(1) + "\n";
}

std::optional<double> safe_specificity(const eval::ConfusionCounts& c) {
  try {
    return eval::specificity(c);
  } catch (const UndefinedMetric&) {
    return std::nullopt;
  }
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

namespace streams {
std::uint64_t init(const RunConfig& c) { return derive_seed(c.seed, {kInitStream}); }
std::uint64_t seed_pick(const RunConfig& c) { return derive_seed(c.seed, {kSeedPickStream}); }
std::uint64_t oracle(const RunConfig& c) { return derive_seed(c.seed, {kOracleStream}); }
std::uint64_t select(const RunConfig& c) { return derive_seed(c.seed, {kSelectStream}); }
std::uint64_t train(const RunConfig& c, int cycle) {
  return derive_seed(c.seed, {kTrainStream, static_cast<std::uint64_t>(cycle)});
}
std::uint64_t mc(const RunConfig& c, int cycle) {
  return derive_seed(c.seed, {kMcStream, static_cast<std::uint64_t>(cycle)});
}
}  // namespace streams

TestScore evaluate(const nn::Predictor& predictor, const ingest::Dataset& dataset,
                   const std::vector<std::string>& image_ids) {
  eval::ConfusionCounts counts;
  for (const auto& id : image_ids) {
    const auto& s = dataset.find(id);
    if (!s.mask) throw InvalidArgument("evaluate: slice '" + id + "' has no mask");
    counts += eval::confusion(argmax_mask(predictor.predict(s.image)), s.mask->classes);
  }
  return {eval::dice(counts), safe_specificity(counts)};
}

std::string to_json_line(const CycleRecord& r) {
  json j = {{"cycle", r.point.cycle},
            {"cost_seconds", r.point.cost_seconds()},
            {"regions_labeled", r.point.regions_labeled},
            {"test_dice", r.point.dice},
            {"test_specificity", r.point.specificity ? json(*r.point.specificity) : json(nullptr)},
            {"val_dice", r.val_dice ? json(*r.val_dice) : json(nullptr)},
            {"best_epoch", r.best_epoch},
            {"epochs_run", r.epochs_run},
            {"selected", r.selected}};
  return j.dump();
}

CycleRecord cycle_record_from_json(std::string_view line, const RunConfig& config) {
  try {
    const auto j = json::parse(line);
    CycleRecord r;
    r.point.cycle = j.at("cycle").get<int>();
    r.point.cost_ms = static_cast<std::int64_t>(std::llround(j.at("cost_seconds").get<double>() * 1000.0));
    r.point.regions_labeled = j.at("regions_labeled").get<int>();
    r.point.dice = j.at("test_dice").get<double>();
    if (!j.at("test_specificity").is_null()) r.point.specificity = j.at("test_specificity").get<double>();
    r.point.heuristic = std::string(acquisition::to_string(config.heuristic));
    r.point.aggregation = std::string(acquisition::to_string(config.aggregation));
    r.point.seed = config.seed;
    if (!j.at("val_dice").is_null()) r.val_dice = j.at("val_dice").get<double>();
    r.best_epoch = j.at("best_epoch").get<int>();
    r.epochs_run = j.at("epochs_run").get<int>();
    r.selected = j.at("selected").get<int>();
    return r;
  } catch (const json::exception& e) {
    throw LoadError(std::string("malformed cycle record: ") + e.what());
  }
}

std::uint64_t label_digest(const PartialLabelMask& labels) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto v : labels.labels.values()) {
    h ^= static_cast<unsigned char>(v);
    h *= 0x100000001b3ULL;
  }
  return h;
}

Workspace prepare_workspace(const RunConfig& config, bool simulated_oracle) {
  config.validate();
  ingest::Dataset ds =
      config.dataset.manifest ? ingest::load_manifest(*config.dataset.manifest) : ingest::synthetic_dataset(config.dataset.synthetic);
  if (ds.samples.empty()) throw InvalidArgument("config: dataset is empty");
  DatasetSplit split = make_split(ds.scans(), config.split);
  if (split.train.empty()) throw InvalidArgument("config: training split is empty");
  if (split.test.empty()) throw InvalidArgument("config: test split is empty");
  if (config.train.patience > 0 && split.val.empty()) {
    throw InvalidArgument("config: early stopping needs a non-empty validation split");
  }
  if (simulated_oracle) require_masks(ds, split.train, "train");
  require_masks(ds, split.val, "val");
  require_masks(ds, split.test, "test");
  if (config.seed_image_count() > static_cast<int>(split.train.size())) {
    throw InvalidArgument("config: seed_images exceeds the training split (" + std::to_string(split.train.size()) +
                          " slices)");
  }
  const auto& first = ds.find(split.train.front()).image;
  RegionGrid grid = build_grid(first.height(), first.width(), config.regions_per_image);
  return {std::move(ds), std::move(split), grid};
}

std::vector<std::string> pick_seed_images(const std::vector<std::string>& train_ids, int n, std::uint64_t seed) {
  if (n < 0 || n > static_cast<int>(train_ids.size())) throw InvalidArgument("pick_seed_images: bad count");
  std::vector<std::pair<std::uint64_t, std::string>> keyed;
  keyed.reserve(train_ids.size());
  for (const auto& id : train_ids) keyed.emplace_back(derive_seed(seed, {hash_string(id.c_str())}), id);
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(keyed[i].second);
  return out;
}

std::vector<acquisition::SelectionLogEntry> seed_entries(const RunConfig& config,
                                                         const std::vector<std::string>& image_ids) {
  const bool whole_slice =
      config.supervision == Supervision::PerPixel && config.cost.full_label == oracle::FullLabelCost::ExpertSlice;
  std::vector<acquisition::SelectionLogEntry> out;
  for (const auto& id : image_ids) {
    const int first = whole_slice ? -1 : 0;
    const int last = whole_slice ? 0 : config.regions_per_image;
    for (int r = first; r < last; ++r) {
      out.push_back({0, "seed", id, r, 0.0, std::string(acquisition::to_string(config.aggregation)), config.seed});
    }
  }
  return out;
}

std::vector<oracle::AnnotationAction> label_selections(const RunConfig& config, RunState& state,
                                                       std::span<const acquisition::SelectionLogEntry> entries,
                                                       int cycle) {
  const std::uint64_t oracle_seed = streams::oracle(config);
  std::vector<oracle::AnnotationAction> actions;
  for (const auto& e : entries) {
    const auto& rec = state.image(e.image_id);
    const auto& gt = *rec.sample->mask;
    oracle::Annotation ann;
    if (e.region_index < 0) {
      ann = oracle::annotate_full_slice(gt, cycle, config.cost);
    } else {
      if (e.region_index >= state.grid().count()) throw InvalidArgument("selection region index out of range");
      const RegionRef ref{e.image_id, e.region_index, rec.regions[e.region_index]};
      ann = config.supervision == Supervision::PointLevel
                ? oracle::annotate_point(state.grid(), ref, gt, oracle_seed, cycle, config.cost)
                : oracle::annotate_full(state.grid(), ref, gt, cycle, config.cost);
    }
    auto recorded = state.record(std::move(ann));
    actions.insert(actions.end(), recorded.begin(), recorded.end());
  }
  return actions;
}

RunResult run(const RunConfig& config, const RunOptions& options) {
  Workspace ws = prepare_workspace(config);
  auto log = [&](const std::string& msg) {
    if (options.log) options.log(msg);
  };

  RunResult result;
  result.run_id = config.resolved_run_id();
  result.run_dir = config.output_dir / result.run_id;
  result.curve_path = config.output_dir / "curves" / (result.run_id + ".csv");
  const auto selection_path = result.run_dir / "selection.jsonl";
  const auto ledger_path = result.run_dir / "ledger.jsonl";
  const auto cycles_path = result.run_dir / "cycles.jsonl";
  if (options.write_outputs) {
    std::filesystem::create_directories(result.run_dir);
    std::filesystem::create_directories(result.curve_path.parent_path());
    write_text(result.run_dir / "config.json", run_config_to_json(config));
    for (const auto& p : {selection_path, ledger_path, cycles_path}) write_text(p, "");
  }

  RunState state(ws.dataset, ws.split.train, ws.grid);
  auto predictor = nn::make_predictor(config.model, 2, config.train.dropout, streams::init(config));
  const nn::LossKind loss =
      config.supervision == Supervision::PointLevel ? nn::LossKind::Point : nn::LossKind::FullSupervision;

  std::vector<nn::ValExample> val;
  for (const auto& id : ws.split.val) {
    const auto& s = ws.dataset.find(id);
    val.push_back({&s.image, &*s.mask});
  }

  auto commit = [&](const std::vector<acquisition::SelectionLogEntry>& entries,
                    const std::vector<oracle::AnnotationAction>& actions) {
    result.selections.insert(result.selections.end(), entries.begin(), entries.end());
    if (!options.write_outputs) return;
    std::vector<std::string> lines;
    for (const auto& e : entries) lines.push_back(acquisition::to_json_line(e));
    append_lines(selection_path, lines);
    oracle::append_ledger_file(ledger_path, actions);
  };

  auto train_and_evaluate = [&](int cycle, int selected) {
    const auto started = std::chrono::steady_clock::now();
    std::vector<nn::TrainExample> examples;
    for (const auto& rec : state.images()) {
      if (rec.labeled_regions() > 0) examples.push_back({&rec.sample->image, &rec.labels, loss});
    }
    nn::TrainConfig tc = config.train;
    tc.seed = streams::train(config, cycle);
    const auto report = predictor->train(examples, val, tc);
    const auto score = evaluate(*predictor, ws.dataset, ws.split.test);
    CycleRecord rec;
    rec.point = {cycle,
                 state.ledger().total_ms(),
                 static_cast<int>(state.regions_labeled()),
                 score.dice,
                 score.specificity,
                 std::string(acquisition::to_string(config.heuristic)),
                 std::string(acquisition::to_string(config.aggregation)),
                 config.seed};
    rec.val_dice = report.best_val_dice;
    rec.best_epoch = report.best_epoch;
    rec.epochs_run = report.epochs_run;
    rec.selected = selected;
    state.add_curve_point(rec.point);
    result.cycles.push_back(rec);
    if (options.write_outputs) {
      append_lines(cycles_path, {to_json_line(rec)});
      eval::write_curve_csv(result.curve_path, state.curve());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    log(result.run_id + " cycle " + std::to_string(cycle) + "/" + std::to_string(config.cycles) + " cost " +
        fixed(rec.point.cost_seconds(), 0) + " s, regions " + std::to_string(rec.point.regions_labeled) + ", dice " +
        fixed(rec.point.dice, 4) + ", val " + (rec.val_dice ? fixed(*rec.val_dice, 4) : "-") + " (" +
        fixed(secs, 1) + " s)");
  };

  {
    const auto ids = pick_seed_images(ws.split.train, config.seed_image_count(), streams::seed_pick(config));
    const auto entries = seed_entries(config, ids);
    const auto actions = label_selections(config, state, entries, 0);
    commit(entries, actions);
    train_and_evaluate(0, static_cast<int>(entries.size()));
  }

  acquisition::SelectionRequest request;
  request.heuristic = config.heuristic;
  request.aggregation = config.aggregation;
  request.images_per_cycle = config.images_per_cycle;
  request.regions_per_image = config.regions_per_selected_image;
  request.seed = streams::select(config);

  for (int t = 1; t <= config.cycles; ++t) {
    state.cycle = t;
    request.cycle = t;
    std::vector<const ImageRecord*> open;
    for (const auto& rec : state.images()) {
      if (!rec.complete()) open.push_back(&rec);
    }
    if (open.empty()) {
      result.exhausted = true;
      log(result.run_id + ": every region labeled after cycle " + std::to_string(t - 1));
      break;
    }
    std::vector<uncertainty::EntropyMap> maps;
    if (config.heuristic == acquisition::Heuristic::Entropy) {
      const auto mc_seed = streams::mc(config, t);
      maps.reserve(open.size());
      for (const auto* rec : open) maps.push_back(uncertainty::mc_entropy(*predictor, rec->sample->image, config.mc_samples, mc_seed));
    }
    std::vector<acquisition::Candidate> candidates;
    for (std::size_t i = 0; i < open.size(); ++i) {
      candidates.push_back({open[i]->id(), &state.grid(), open[i]->regions, maps.empty() ? nullptr : &maps[i]});
    }
    const auto picked = acquisition::select(request, candidates);
    if (picked.empty()) {
      result.exhausted = true;
      break;
    }
    std::vector<acquisition::SelectionLogEntry> entries;
    for (const auto& s : picked) {
      entries.push_back({t, std::string(acquisition::to_string(config.heuristic)), s.region.image_id,
                         s.region.region_index, s.score, std::string(acquisition::to_string(config.aggregation)),
                         config.seed});
    }
    const auto actions = label_selections(config, state, entries, t);
    commit(entries, actions);
    train_and_evaluate(t, static_cast<int>(entries.size()));
  }

  result.curve = state.curve();
  result.ledger = state.ledger();
  result.region_states = state.region_states();
  result.labels = state.label_masks();
  result.final_pools = state.pools();
  if (options.write_outputs) {
    write_text(result.run_dir / "label_state.json", label_state_json(state));
    predictor->save(result.run_dir / "model.json");
    eval::write_curve_csv(result.curve_path, state.curve());
  }
  return result;
}

ReplayResult replay(const RunConfig& config, std::span<const acquisition::SelectionLogEntry> entries) {
  Workspace ws = prepare_workspace(config);
  RunState state(ws.dataset, ws.split.train, ws.grid);
  std::size_t i = 0;
  while (i < entries.size()) {
    std::size_t j = i;
    while (j < entries.size() && entries[j].cycle == entries[i].cycle) ++j;
    if (i > 0 && entries[i].cycle < entries[i - 1].cycle) throw InvalidArgument("selection log cycles go backwards");
    label_selections(config, state, entries.subspan(i, j - i), entries[i].cycle);
    i = j;
  }
  return {config, state.ledger(), state.region_states(), state.label_masks()};
}

ReplayResult replay(const std::filesystem::path& selection_log) {
  const auto config_path = selection_log.parent_path() / "config.json";
  RunConfig config = load_run_config(config_path);
  const auto entries = acquisition::read_selection_log(selection_log);
  return replay(config, entries);
}

std::vector<std::string> verify_replay(const std::filesystem::path& selection_log, ReplayResult* out) {
  ReplayResult r = replay(selection_log);
  std::vector<std::string> problems;
  const auto dir = selection_log.parent_path();

  const auto ledger_path = dir / "ledger.jsonl";
  if (!std::filesystem::exists(ledger_path)) {
    problems.push_back("missing " + ledger_path.string());
  } else {
    const auto recorded = oracle::replay_ledger(ledger_path);
    if (recorded.total_ms() != r.ledger.total_ms()) {
      problems.push_back("ledger total differs: recorded " + std::to_string(recorded.total_ms()) + " ms, replayed " +
                         std::to_string(r.ledger.total_ms()) + " ms");
    } else if (!(recorded == r.ledger)) {
      problems.push_back("ledger entries differ");
    }
  }

  const auto state_path = dir / "label_state.json";
  if (!std::filesystem::exists(state_path)) {
    problems.push_back("missing " + state_path.string());
  } else {
    std::ifstream in(state_path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw LoadError("malformed " + state_path.string() + ": " + e.what());
    }
    std::set<std::string> seen;
    for (const auto& img : j.at("images")) {
      const auto id = img.at("image_id").get<std::string>();
      seen.insert(id);
      auto it = r.region_states.find(id);
      if (it == r.region_states.end()) {
        problems.push_back("image '" + id + "' not in the replayed state");
        continue;
      }
      std::vector<RegionState> states;
      for (const auto& s : img.at("regions")) states.push_back(region_state_from_string(s.get<std::string>()));
      if (states != it->second) problems.push_back("region states differ for '" + id + "'");
      if (img.at("labels_digest").get<std::uint64_t>() != label_digest(r.labels.at(id))) {
        problems.push_back("label mask differs for '" + id + "'");
      }
    }
    if (seen.size() != r.region_states.size()) problems.push_back("image sets differ");
  }
  if (out) *out = std::move(r);
  return problems;
}

}  // namespace ral::orchestrate
