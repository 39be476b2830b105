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

#include "ral/service/session.hpp"

#include <algorithm>
#include <chrono>
#include <fcntl.h>
#include <fstream>
#include <random>
#include <sstream>
#include <unistd.h>

#include <json.hpp>

#include "ral/data/errors.hpp"
#include "ral/ingest/preprocess.hpp"
#include "ral/oracle/ledger.hpp"

namespace ral::service {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(JobState s) {
  switch (s) {
    case JobState::Idle:
      return "idle";
    case JobState::Training:
      return "training";
    case JobState::Failed:
      return "failed";
  }
  return "idle";
}

namespace {

void fsync_path(const fs::path& path) {
  const int fd = ::open(path.c_str(), O_RDONLY);
  if (fd < 0) throw LoadError("cannot open " + path.string() + " for fsync");
  const int rc = ::fsync(fd);
  ::close(fd);
  if (rc != 0) throw LoadError("fsync failed for " + path.string());
}

void durable_write(const fs::path& path, const std::string& text) {
  const auto tmp = fs::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw LoadError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw LoadError("write failed: " + tmp.string());
  }
  fsync_path(tmp);
  fs::rename(tmp, path);
}

void durable_append(const fs::path& path, const std::string& line) {
  {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw LoadError("cannot append to " + path.string());
    out << line << '\n';
    out.flush();
    if (!out) throw LoadError("append failed: " + path.string());
  }
  fsync_path(path);
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::vector<std::string> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

Session::Session(std::string id, fs::path dir, orchestrate::RunConfig config)
    : id_(std::move(id)),
      dir_(std::move(dir)),
      config_(std::move(config)),
      ws_(orchestrate::prepare_workspace(config_, false)) {
  state_ = std::make_unique<orchestrate::RunState>(ws_.dataset, ws_.split.train, ws_.grid);
  predictor_ = nn::make_predictor(config_.model, 2, config_.train.dropout, orchestrate::streams::init(config_));
  seed_images_ = orchestrate::pick_seed_images(ws_.split.train, config_.seed_image_count(),
                                               orchestrate::streams::seed_pick(config_));
}

Session::~Session() {
  if (worker_.joinable()) worker_.join();
}

std::unique_ptr<Session> Session::create(const std::string& id, const fs::path& dir,
                                         const orchestrate::RunConfig& config) {
  std::unique_ptr<Session> s(new Session(id, dir, config));
  fs::create_directories(dir);
  for (const char* f : {"labels.jsonl", "selection.jsonl", "cycles.jsonl"}) durable_write(dir / f, "");
  s->write_session_file();
  return s;
}

std::unique_ptr<Session> Session::open(const fs::path& dir) {
  std::ifstream in(dir / "session.json");
  if (!in) throw LoadError("no session.json in " + dir.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw LoadError("malformed session.json in " + dir.string() + ": " + e.what());
  }
  auto config = orchestrate::parse_run_config(j.at("config").dump());
  std::unique_ptr<Session> s(new Session(j.at("id").get<std::string>(), dir, config));

  // Labels: consecutive actions on one region form one submission.
  std::vector<oracle::AnnotationAction> actions;
  for (const auto& line : read_lines(dir / "labels.jsonl")) actions.push_back(oracle::action_from_json(line));
  std::size_t i = 0;
  while (i < actions.size()) {
    std::size_t k = i + 1;
    while (k < actions.size() && actions[k].image_id == actions[i].image_id &&
           actions[k].region_index == actions[i].region_index && actions[k].kind == oracle::ActionKind::PointLabel &&
           actions[i].kind == oracle::ActionKind::PointLabel) {
      ++k;
    }
    const RegionRef ref{actions[i].image_id, actions[i].region_index, RegionState::Unlabeled};
    oracle::Annotation ann;
    if (actions[i].kind == oracle::ActionKind::BackgroundTag) {
      ann = oracle::manual_background(s->ws_.grid, ref, actions[i].cycle, config.cost);
    } else if (actions[i].kind == oracle::ActionKind::PointLabel) {
      std::vector<oracle::Pixel> points;
      for (std::size_t a = i; a < k; ++a) points.insert(points.end(), actions[a].points.begin(), actions[a].points.end());
      ann = oracle::manual_points(s->ws_.grid, ref, points, actions[i].cycle, config.cost);
    } else {
      throw LoadError("unexpected action kind in " + (dir / "labels.jsonl").string());
    }
    ann.actions.assign(actions.begin() + static_cast<std::ptrdiff_t>(i), actions.begin() + static_cast<std::ptrdiff_t>(k));
    s->state_->record_timestamped(ann);
    i = k;
  }

  for (const auto& line : read_lines(dir / "cycles.jsonl")) {
    s->cycles_.push_back(orchestrate::cycle_record_from_json(line, config));
    s->state_->add_curve_point(s->cycles_.back().point);
  }
  s->completed_ = static_cast<int>(s->cycles_.size());
  if (s->completed_ > 0) {
    if (!fs::exists(dir / "model.json")) throw LoadError("session " + s->id_ + " has cycles but no model.json");
    s->predictor_ = nn::load_predictor(dir / "model.json");
    s->recompute_maps();
  }
  const auto& job = j.at("job");
  if (job.at("state").get<std::string>() == "failed") {
    s->job_ = {JobState::Failed, "", job.at("reason").get<std::string>()};
  }
  // An interrupted job left no committed cycle; the session resumes idle.
  s->write_session_file();
  return s;
}

void Session::write_session_file() const {
  json j = {{"id", id_},
            {"config", json::parse(orchestrate::run_config_to_json(config_))},
            {"completed_cycles", completed_},
            {"job", {{"state", to_string(job_.state)}, {"reason", job_.reason}}}};
  durable_write(dir_ / "session.json", j.dump(2) + "\n");
}

std::vector<const orchestrate::ImageRecord*> Session::open_images() const {
  std::vector<const orchestrate::ImageRecord*> out;
  for (const auto& rec : state_->images()) {
    if (!rec.complete()) out.push_back(&rec);
  }
  return out;
}

void Session::recompute_maps() {
  maps_.clear();
  if (completed_ == 0) return;
  const auto seed = orchestrate::streams::mc(config_, completed_ - 1);
  for (const auto* rec : open_images()) {
    maps_.emplace(rec->id(), uncertainty::mc_entropy(*predictor_, rec->sample->image, config_.mc_samples, seed));
  }
}

std::vector<QueueItem> Session::seed_queue(int k) const {
  std::vector<QueueItem> out;
  for (const auto& id : seed_images_) {
    const auto& rec = state_->image(id);
    for (int r = 0; r < ws_.grid.count() && static_cast<int>(out.size()) < k; ++r) {
      if (!is_labeled(rec.regions[r])) out.push_back({{id, r, rec.regions[r]}, ws_.grid.bounds(r), 0.0});
    }
  }
  return out;
}

std::vector<QueueItem> Session::ranked(int k) const {
  const auto open = open_images();
  std::vector<acquisition::Candidate> candidates;
  for (const auto* rec : open) {
    const auto it = maps_.find(rec->id());
    const uncertainty::EntropyMap* map = it == maps_.end() ? nullptr : &it->second;
    if (config_.heuristic == acquisition::Heuristic::Entropy && map == nullptr) continue;
    candidates.push_back({rec->id(), &ws_.grid, rec->regions, map});
  }
  acquisition::SelectionRequest req;
  req.heuristic = config_.heuristic;
  req.aggregation = config_.aggregation;
  req.cycle = completed_;
  req.seed = orchestrate::streams::select(config_);
  std::vector<QueueItem> out;
  for (const auto& s : acquisition::rank_all_regions(req, candidates)) {
    if (static_cast<int>(out.size()) >= k) break;
    out.push_back({s.region, ws_.grid.bounds(s.region.region_index), s.score});
  }
  return out;
}

Queue Session::queue(int k) const {
  if (k < 0) throw ServiceError(400, "k must be >= 0");
  std::shared_lock lock(mutex_);
  Queue q;
  q.cycle = completed_;
  q.exhausted = open_images().empty();
  if (q.exhausted) return q;
  if (completed_ == 0) {
    q.items = seed_queue(k);
    q.needs_training = q.items.empty();
    return q;
  }
  q.items = ranked(k);
  return q;
}

double Session::queue_score(const std::string& image_id, int region) const {
  if (completed_ == 0) return 0.0;
  for (const auto& item : ranked(std::numeric_limits<int>::max())) {
    if (item.region.image_id == image_id && item.region.region_index == region) return item.score;
  }
  return 0.0;
}

LabelResult Session::label(const LabelRequest& req) {
  std::unique_lock lock(mutex_);
  if (job_.state == JobState::Training) throw ServiceError(409, "training in progress; labels are read-only");
  if (!state_->contains(req.image_id)) throw ServiceError(404, "unknown image '" + req.image_id + "'");
  if (req.region_index < 0 || req.region_index >= ws_.grid.count()) {
    throw ServiceError(404, "unknown region " + std::to_string(req.region_index));
  }
  const auto& rec = state_->image(req.image_id);
  const RegionRef ref{req.image_id, req.region_index, rec.regions[req.region_index]};
  if (is_labeled(ref.state)) throw ServiceError(409, "region already labeled");
  if (req.background == !req.points.empty()) {
    throw ServiceError(400, "give either points or background: true");
  }
  oracle::Annotation ann;
  try {
    ann = req.background ? oracle::manual_background(ws_.grid, ref, completed_, config_.cost)
                         : oracle::manual_points(ws_.grid, ref, req.points, completed_, config_.cost);
  } catch (const InvalidArgument& e) {
    throw ServiceError(422, e.what());
  }
  const double score = queue_score(req.image_id, req.region_index);
  const auto stamp = now_ms();
  for (auto& a : ann.actions) a.timestamp_ms = stamp;

  // Durable before the in-memory state changes and before the response.
  std::string lines;
  for (const auto& a : ann.actions) {
    if (!lines.empty()) lines += '\n';
    lines += oracle::to_json_line(a);
  }
  durable_append(dir_ / "labels.jsonl", lines);
  const acquisition::SelectionLogEntry entry{completed_,
                                             completed_ == 0 ? "seed" : std::string(acquisition::to_string(config_.heuristic)),
                                             req.image_id,
                                             req.region_index,
                                             score,
                                             std::string(acquisition::to_string(config_.aggregation)),
                                             config_.seed};
  durable_append(dir_ / "selection.jsonl", acquisition::to_json_line(entry));

  state_->record_timestamped(ann);
  return {state_->image(req.image_id).regions[req.region_index], ann.cost_ms(), state_->ledger().total_ms()};
}

void Session::start_training() {
  std::unique_lock lock(mutex_);
  if (job_.state == JobState::Training) throw ServiceError(409, "a training job is already running");
  const bool fresh = std::any_of(state_->ledger().actions().begin(), state_->ledger().actions().end(),
                                 [&](const auto& a) { return a.cycle == completed_; });
  if (!fresh) throw ServiceError(409, "nothing labeled since the last training cycle");
  if (worker_.joinable()) worker_.join();
  job_ = {JobState::Training, "training", ""};
  write_session_file();
  worker_ = std::thread([this, cycle = completed_] { run_job(cycle); });
}

void Session::run_job(int cycle) {
  try {
    std::unique_ptr<nn::Predictor> model;
    std::vector<PartialLabelMask> labels;
    std::vector<nn::TrainExample> examples;
    std::vector<nn::ValExample> val;
    std::int64_t cost_ms = 0;
    int regions = 0;
    int selected = 0;
    {
      std::shared_lock lock(mutex_);
      model = predictor_->clone();
      for (const auto& rec : state_->images()) {
        if (rec.labeled_regions() > 0) labels.push_back(rec.labels);
      }
      std::size_t li = 0;
      for (const auto& rec : state_->images()) {
        if (rec.labeled_regions() > 0) examples.push_back({&rec.sample->image, &labels[li++], nn::LossKind::Point});
      }
      cost_ms = state_->ledger().total_ms();
      regions = static_cast<int>(state_->regions_labeled());
      for (const auto& a : state_->ledger().actions()) selected += a.cycle == cycle ? 1 : 0;
    }
    for (const auto& id : ws_.split.val) {
      const auto& s = ws_.dataset.find(id);
      val.push_back({&s.image, &*s.mask});
    }
    nn::TrainConfig tc = config_.train;
    tc.seed = orchestrate::streams::train(config_, cycle);
    const auto report = model->train(examples, val, tc);
    {
      std::unique_lock lock(mutex_);
      job_.phase = "evaluating";
    }
    const auto score = orchestrate::evaluate(*model, ws_.dataset, ws_.split.test);
    {
      std::unique_lock lock(mutex_);
      job_.phase = "scoring";
    }
    // Labels are frozen while the job runs, so the open set is stable.
    std::map<std::string, uncertainty::EntropyMap> maps;
    std::vector<const orchestrate::ImageRecord*> open;
    {
      std::shared_lock lock(mutex_);
      open = open_images();
    }
    const auto mc_seed = orchestrate::streams::mc(config_, cycle);
    for (const auto* rec : open) {
      maps.emplace(rec->id(), uncertainty::mc_entropy(*model, rec->sample->image, config_.mc_samples, mc_seed));
    }

    orchestrate::CycleRecord rec;
    rec.point = {cycle,
                 cost_ms,
                 regions,
                 score.dice,
                 score.specificity,
                 std::string(acquisition::to_string(config_.heuristic)),
                 std::string(acquisition::to_string(config_.aggregation)),
                 config_.seed};
    rec.val_dice = report.best_val_dice;
    rec.best_epoch = report.best_epoch;
    rec.epochs_run = report.epochs_run;
    rec.selected = selected;

    std::unique_lock lock(mutex_);
    model->save(dir_ / "model.json");
    durable_append(dir_ / "cycles.jsonl", orchestrate::to_json_line(rec));
    predictor_ = std::move(model);
    maps_ = std::move(maps);
    cycles_.push_back(rec);
    state_->add_curve_point(rec.point);
    completed_ = cycle + 1;
    job_ = {};
    write_session_file();
  } catch (const std::exception& e) {
    std::unique_lock lock(mutex_);
    job_ = {JobState::Failed, "", e.what()};
    try {
      write_session_file();
    } catch (const std::exception&) {
      // The in-memory status still reports the failure.
    }
  }
}

void Session::wait_idle() {
  for (;;) {
    {
      std::shared_lock lock(mutex_);
      if (job_.state != JobState::Training) break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  std::unique_lock lock(mutex_);
  if (worker_.joinable()) worker_.join();
}

Status Session::status() const {
  std::shared_lock lock(mutex_);
  Status s;
  s.id = id_;
  s.cycle = completed_;
  s.budget_seconds = state_->ledger().total_seconds();
  s.labeled_regions = static_cast<int>(state_->regions_labeled());
  if (!cycles_.empty()) {
    s.val_dice = cycles_.back().val_dice;
    s.test_dice = cycles_.back().point.dice;
  }
  s.job = job_;
  return s;
}

std::string Session::curve_csv() const {
  std::shared_lock lock(mutex_);
  return eval::format_curve_csv(state_->curve());
}

std::size_t Session::ledger_size() const {
  std::shared_lock lock(mutex_);
  return state_->ledger().size();
}

std::int64_t Session::budget_ms() const {
  std::shared_lock lock(mutex_);
  return state_->ledger().total_ms();
}

std::map<std::string, std::vector<RegionState>> Session::region_states() const {
  std::shared_lock lock(mutex_);
  return state_->region_states();
}

Array2D<std::uint8_t> Session::slice_u8(const std::string& image_id) const {
  const auto& prep = ws_.dataset.manifest.preprocessing;
  return ingest::denormalize_to_u8(ws_.dataset.find(image_id).image.pixels, prep.mean, prep.std);
}

std::optional<Array2D<std::uint8_t>> Session::entropy_u8(const std::string& image_id) const {
  std::shared_lock lock(mutex_);
  const auto it = maps_.find(image_id);
  if (it == maps_.end()) return std::nullopt;
  return uncertainty::entropy_to_u8(it->second);
}

SessionStore::SessionStore(fs::path data_dir) : data_dir_(std::move(data_dir)) {
  fs::create_directories(data_dir_);
  for (const auto& entry : fs::directory_iterator(data_dir_)) {
    if (!entry.is_directory() || !fs::exists(entry.path() / "session.json")) continue;
    auto s = Session::open(entry.path());
    sessions_.emplace(s->id(), std::move(s));
  }
}

Session& SessionStore::create(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw ServiceError(400, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ServiceError(400, "body must be a JSON object");
  orchestrate::RunConfig config;
  try {
    config = orchestrate::parse_run_config(j.contains("config") ? j.at("config").dump() : "{}");
  } catch (const InvalidArgument& e) {
    throw ServiceError(400, e.what());
  }
  if (j.contains("manifest")) {
    if (!j.at("manifest").is_string()) throw ServiceError(400, "manifest must be a path string");
    const fs::path manifest = j.at("manifest").get<std::string>();
    if (!fs::exists(manifest)) throw ServiceError(404, "dataset not found: " + manifest.string());
    config.dataset.manifest = manifest;
  }
  if (config.dataset.manifest && !fs::exists(*config.dataset.manifest)) {
    throw ServiceError(404, "dataset not found: " + config.dataset.manifest->string());
  }

  std::lock_guard lock(mutex_);
  std::random_device rd;
  std::string id;
  do {
    std::ostringstream os;
    os << std::hex << ((static_cast<std::uint64_t>(rd()) << 32) ^ rd() ^ static_cast<std::uint64_t>(now_ms()));
    id = "s" + os.str().substr(0, 12);
  } while (sessions_.count(id) || fs::exists(data_dir_ / id));
  config.run_id = id;
  std::unique_ptr<Session> s;
  try {
    s = Session::create(id, data_dir_ / id, config);
  } catch (const InvalidArgument& e) {
    throw ServiceError(400, e.what());
  } catch (const LoadError& e) {
    throw ServiceError(400, e.what());
  }
  auto& ref = *s;
  sessions_.emplace(id, std::move(s));
  return ref;
}

Session& SessionStore::get(const std::string& id) {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(404, "unknown session '" + id + "'");
  return *it->second;
}

std::vector<std::string> SessionStore::ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, s] : sessions_) out.push_back(id);
  return out;
}

}  // namespace ral::service
