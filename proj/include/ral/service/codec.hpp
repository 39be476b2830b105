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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ral/data/array.hpp"
#include "ral/data/grid.hpp"

namespace ral::service {

/// RFC 4648 base64 with padding.
std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws InvalidArgument on characters outside the alphabet or bad padding.
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// Grayscale PNG as base64.
std::string png_base64(const Array2D<std::uint8_t>& pixels);

Array2D<std::uint8_t> crop(const Array2D<std::uint8_t>& src, const Rect& r);

}  // namespace ral::service
