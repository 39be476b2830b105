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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ral/data/errors.hpp"

namespace ral {

/// Dense row-major 2D raster. Indexing is (row, col) everywhere.
template <typename T>
class Array2D {
 public:
  Array2D() = default;
  Array2D(int rows, int cols, T fill = T{}) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) {
      throw InvalidArgument("Array2D: negative dimensions");
    }
    data_.assign(static_cast<std::size_t>(rows) * cols, fill);
  }
  Array2D(int rows, int cols, std::vector<T> values) : rows_(rows), cols_(cols), data_(std::move(values)) {
    if (rows < 0 || cols < 0 || data_.size() != static_cast<std::size_t>(rows) * cols) {
      throw InvalidArgument("Array2D: value count does not match shape");
    }
  }

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const T& operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  const std::vector<T>& storage() const noexcept { return data_; }

  template <typename U>
  bool same_shape(const Array2D<U>& other) const noexcept {
    return rows_ == other.rows() && cols_ == other.cols();
  }

  friend bool operator==(const Array2D&, const Array2D&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

/// Per-pixel class probabilities, H x W x C, pixel-major (the C values of a
/// pixel are contiguous).
class ProbMap {
 public:
  ProbMap() = default;
  ProbMap(int height, int width, int classes, double fill = 0.0);
  ProbMap(int height, int width, int classes, std::vector<double> values);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int classes() const noexcept { return classes_; }
  std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(height_) * width_; }

  double& at(int r, int c, int k) { return values_[index(r, c, k)]; }
  double at(int r, int c, int k) const { return values_[index(r, c, k)]; }

  std::span<double> pixel(int r, int c) { return {values_.data() + index(r, c, 0), static_cast<std::size_t>(classes_)}; }
  std::span<const double> pixel(int r, int c) const {
    return {values_.data() + index(r, c, 0), static_cast<std::size_t>(classes_)};
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool same_shape(const ProbMap& o) const noexcept {
    return height_ == o.height_ && width_ == o.width_ && classes_ == o.classes_;
  }

  friend bool operator==(const ProbMap&, const ProbMap&) = default;

 private:
  std::size_t index(int r, int c, int k) const noexcept {
    return (static_cast<std::size_t>(r) * width_ + c) * classes_ + k;
  }

  int height_ = 0;
  int width_ = 0;
  int classes_ = 0;
  std::vector<double> values_;
};

/// Argmax over classes; returns a binary mask when C = 2.
Array2D<std::uint8_t> argmax_mask(const ProbMap& probs);

}  // namespace ral
