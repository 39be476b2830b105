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

#include "ral/oracle/ledger.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "ral/data/errors.hpp"

namespace ral::oracle {

using nlohmann::json;

void BudgetLedger::append(const AnnotationAction& action) {
  if (action.cost_ms <= 0) throw InvalidArgument("ledger: action cost must be positive");
  actions_.push_back(action);
  total_ms_ += action.cost_ms;
}

void BudgetLedger::append(std::span<const AnnotationAction> actions) {
  for (const auto& a : actions) append(a);
}

std::size_t BudgetLedger::count(ActionKind kind) const noexcept {
  std::size_t n = 0;
  for (const auto& a : actions_) n += a.kind == kind;
  return n;
}

std::string to_json_line(const AnnotationAction& a) {
  json points = json::array();
  for (const auto& p : a.points) points.push_back({p.row, p.col});
  return json{{"kind", to_string(a.kind)},  {"image_id", a.image_id}, {"region_index", a.region_index},
              {"points", points},           {"vertices", a.vertices}, {"cost_ms", a.cost_ms},
              {"cycle", a.cycle},           {"timestamp_ms", a.timestamp_ms}}
      .dump();
}

AnnotationAction action_from_json(std::string_view line) {
  try {
    const auto j = json::parse(line);
    AnnotationAction a;
    a.kind = action_kind_from_string(j.at("kind").get<std::string>());
    a.image_id = j.at("image_id").get<std::string>();
    a.region_index = j.at("region_index").get<int>();
    for (const auto& p : j.at("points")) a.points.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
    a.vertices = j.at("vertices").get<int>();
    a.cost_ms = j.at("cost_ms").get<std::int64_t>();
    a.cycle = j.at("cycle").get<int>();
    a.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
    return a;
  } catch (const json::exception& e) {
    throw LoadError(std::string("ledger: bad line: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw LoadError(std::string("ledger: bad line: ") + e.what());
  }
}

void append_ledger_file(const std::filesystem::path& path, std::span<const AnnotationAction> actions) {
  std::string text;
  for (const auto& a : actions) text += to_json_line(a) + "\n";
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) throw LoadError("ledger: cannot open " + path.string() + ": " + std::strerror(errno));
  std::size_t done = 0;
  while (done < text.size()) {
    const ssize_t n = ::write(fd, text.data() + done, text.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      throw LoadError("ledger: write failed for " + path.string());
    }
    done += static_cast<std::size_t>(n);
  }
  const bool synced = ::fsync(fd) == 0;
  ::close(fd);
  if (!synced) throw LoadError("ledger: fsync failed for " + path.string());
}

void write_ledger_file(const std::filesystem::path& path, const BudgetLedger& ledger) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  for (const auto& a : ledger.actions()) out << to_json_line(a) << '\n';
  if (!out) throw LoadError("ledger: write failed for " + path.string());
}

BudgetLedger replay_ledger(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("ledger not found: " + path.string());
  BudgetLedger ledger;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ledger.append(action_from_json(line));
  }
  return ledger;
}

}  // namespace ral::oracle
