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
#include <string_view>
#include <vector>

#include "ral/oracle/oracle.hpp"

namespace ral::oracle {

/// Append-only record of annotation actions. The running total is kept in
/// integer milliseconds, so it always equals the sum of the entries.
class BudgetLedger {
 public:
  void append(const AnnotationAction& action);
  void append(std::span<const AnnotationAction> actions);

  const std::vector<AnnotationAction>& actions() const noexcept { return actions_; }
  std::size_t size() const noexcept { return actions_.size(); }
  std::int64_t total_ms() const noexcept { return total_ms_; }
  double total_seconds() const noexcept { return static_cast<double>(total_ms_) / 1000.0; }
  std::size_t count(ActionKind kind) const noexcept;

  friend bool operator==(const BudgetLedger&, const BudgetLedger&) = default;

 private:
  std::vector<AnnotationAction> actions_;
  std::int64_t total_ms_ = 0;
};

std::string to_json_line(const AnnotationAction& action);
AnnotationAction action_from_json(std::string_view line);

/// Appends one line per action and flushes it to stable storage.
void append_ledger_file(const std::filesystem::path& path, std::span<const AnnotationAction> actions);
void write_ledger_file(const std::filesystem::path& path, const BudgetLedger& ledger);
/// Rebuilds a ledger from its JSON-lines file.
BudgetLedger replay_ledger(const std::filesystem::path& path);

}  // namespace ral::oracle
