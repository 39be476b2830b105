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
#include <vector>

#include "ral/data/array.hpp"

namespace ral::ingest {

/// 8-bit grayscale PNG.
void write_png_gray(const std::filesystem::path& path, const Array2D<std::uint8_t>& pixels);
std::vector<std::uint8_t> encode_png_gray(const Array2D<std::uint8_t>& pixels);

/// 8-bit paletted PNG holding class indices (palette: 0 black, 1 red).
void write_png_mask(const std::filesystem::path& path, const Array2D<std::uint8_t>& mask);

/// Reads an 8-bit (or lower bit-depth) grayscale PNG as intensities, or a
/// paletted PNG as raw palette indices. Other formats raise LoadError.
Array2D<std::uint8_t> read_png(const std::filesystem::path& path);

}  // namespace ral::ingest
