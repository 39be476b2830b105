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

#include <stdexcept>
#include <string>

namespace ral {

// Thrown on contract violations in arguments (bad shapes, out-of-range
// indices, malformed configs).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation not allowed in the current state (e.g. relabeling a region).
class InvalidState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Non-finite weights or losses.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Metric undefined for the given counts (specificity with no negatives).
class UndefinedMetric : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// File-level failures: missing files, unreadable formats, shape mismatches.
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ral
