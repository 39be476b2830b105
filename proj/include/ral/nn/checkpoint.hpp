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
#include <string>

#include "ral/nn/trainer.hpp"

namespace ral::nn {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  Model model;
  double dropout = 0.5;
  std::uint64_t seed = 0;
};

/// JSON container: layer shapes, per-layer weights and biases, Adam moments,
/// dropout rate and seed. Doubles are written in shortest round-trip form so
/// a reload reproduces forward outputs bit for bit.
std::string checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace ral::nn
