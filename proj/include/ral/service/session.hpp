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
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ral/eval/curves.hpp"
#include "ral/nn/predictor.hpp"
#include "ral/oracle/components.hpp"
#include "ral/orchestrate/config.hpp"
#include "ral/orchestrate/run_state.hpp"
#include "ral/orchestrate/runner.hpp"
#include "ral/uncertainty/uncertainty.hpp"

namespace ral::service {

/// A request failure that maps onto an HTTP status code.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, const std::string& message) : std::runtime_error(message), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

enum class JobState { Idle, Training, Failed };

std::string_view to_string(JobState s);

struct JobStatus {
  JobState state = JobState::Idle;
  std::string phase;   // "training", "evaluating" or "scoring" while training
  std::string reason;  // set when Failed
};

struct QueueItem {
  RegionRef region;
  Rect rect;
  double score = 0.0;
};

struct Queue {
  std::vector<QueueItem> items;
  bool exhausted = false;       // no unlabeled region left
  bool needs_training = false;  // seed regions done, no model ranking yet
  int cycle = 0;
};

struct LabelRequest {
  std::string image_id;
  int region_index = -1;
  std::vector<oracle::Pixel> points;
  bool background = false;
};

struct LabelResult {
  RegionState state = RegionState::Unlabeled;
  std::int64_t cost_ms = 0;
  std::int64_t budget_ms = 0;
};

struct Status {
  std::string id;
  int cycle = 0;  // completed training cycles
  double budget_seconds = 0.0;
  int labeled_regions = 0;
  std::optional<double> val_dice;
  std::optional<double> test_dice;
  JobStatus job;
};

/// One human-in-the-loop labeling session. Label submissions and training
/// commits take the write lock; queue, status and curve reads share it.
/// Files in the session directory: session.json, labels.jsonl (the ledger,
/// fsynced per submission), selection.jsonl, cycles.jsonl, model.json.
class Session {
 public:
  /// Creates the session directory; `config` must name its dataset.
  static std::unique_ptr<Session> create(const std::string& id, const std::filesystem::path& dir,
                                         const orchestrate::RunConfig& config);
  /// Rebuilds a session from its directory by replaying the logs.
  static std::unique_ptr<Session> open(const std::filesystem::path& dir);

  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  const std::string& id() const noexcept { return id_; }
  const orchestrate::RunConfig& config() const noexcept { return config_; }

  Queue queue(int k) const;
  LabelResult label(const LabelRequest& request);

  /// Starts a background training cycle. Throws ServiceError(409) while a
  /// job runs or when nothing was labeled since the last cycle.
  void start_training();
  /// Blocks until no job is running.
  void wait_idle();

  Status status() const;
  std::string curve_csv() const;
  std::size_t ledger_size() const;
  std::int64_t budget_ms() const;
  std::map<std::string, std::vector<RegionState>> region_states() const;

  /// Rendering helpers for the queue: 8-bit slice, and the entropy map of
  /// the last cycle when one exists.
  Array2D<std::uint8_t> slice_u8(const std::string& image_id) const;
  std::optional<Array2D<std::uint8_t>> entropy_u8(const std::string& image_id) const;

 private:
  Session(std::string id, std::filesystem::path dir, orchestrate::RunConfig config);

  void write_session_file() const;
  void recompute_maps();
  std::vector<const orchestrate::ImageRecord*> open_images() const;
  std::vector<QueueItem> ranked(int k) const;
  std::vector<QueueItem> seed_queue(int k) const;
  double queue_score(const std::string& image_id, int region) const;
  void run_job(int cycle);

  std::string id_;
  std::filesystem::path dir_;
  orchestrate::RunConfig config_;
  orchestrate::Workspace ws_;
  std::unique_ptr<orchestrate::RunState> state_;
  std::unique_ptr<nn::Predictor> predictor_;
  std::vector<std::string> seed_images_;
  std::map<std::string, uncertainty::EntropyMap> maps_;
  std::vector<orchestrate::CycleRecord> cycles_;
  int completed_ = 0;
  JobStatus job_;

  mutable std::shared_mutex mutex_;
  std::thread worker_;
};

/// Sessions under one data directory, keyed by id.
class SessionStore {
 public:
  /// Loads every session found in `data_dir` (creating the directory).
  explicit SessionStore(std::filesystem::path data_dir);

  /// Parses a POST /sessions body: {"manifest": path, "config": {...}} where
  /// the manifest overrides the config's dataset.
  Session& create(const std::string& body);
  Session& get(const std::string& id);
  std::vector<std::string> ids() const;
  const std::filesystem::path& data_dir() const noexcept { return data_dir_; }

 private:
  std::filesystem::path data_dir_;
  std::map<std::string, std::unique_ptr<Session>> sessions_;
  mutable std::mutex mutex_;
};

}  // namespace ral::service
