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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ral/data/array.hpp"
#include "ral/data/image.hpp"
#include "ral/nn/checkpoint.hpp"
#include "ral/nn/trainer.hpp"

namespace ral::nn {

struct TrainReport {
  std::optional<double> best_val_dice;
  int best_epoch = 0;
  int epochs_run = 0;
};

/// Per-pixel classifier behind the active-learning loop. Implementations
/// must be deterministic given their seeds.
class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual std::string_view kind() const = 0;
  virtual int classes() const = 0;
  virtual double dropout() const = 0;

  /// Deterministic prediction (dropout off).
  virtual ProbMap predict(const ImageSlice& image) const = 0;
  /// `count` posterior samples; sample i depends only on (seed, i).
  virtual std::vector<ProbMap> predict_samples(const ImageSlice& image, int count, std::uint64_t seed) const = 0;

  virtual TrainReport train(std::span<const TrainExample> labeled, std::span<const ValExample> val,
                            const TrainConfig& config) = 0;

  virtual void save(const std::filesystem::path& path) const = 0;
  virtual std::unique_ptr<Predictor> clone() const = 0;
};

/// The reference convolutional network. Each train() call continues from the
/// current parameters and optimizer state and keeps the best-validation
/// snapshot.
class ConvNetPredictor final : public Predictor {
 public:
  ConvNetPredictor(Model model, double dropout, std::uint64_t seed);
  static ConvNetPredictor reference(int classes, double dropout, std::uint64_t seed);

  std::string_view kind() const override { return "convnet"; }
  int classes() const override { return model_.params.classes(); }
  double dropout() const override { return dropout_; }

  ProbMap predict(const ImageSlice& image) const override;
  std::vector<ProbMap> predict_samples(const ImageSlice& image, int count, std::uint64_t seed) const override;
  TrainReport train(std::span<const TrainExample> labeled, std::span<const ValExample> val,
                    const TrainConfig& config) override;
  void save(const std::filesystem::path& path) const override;
  std::unique_ptr<Predictor> clone() const override;

  const Model& model() const noexcept { return model_; }

 private:
  Model model_;
  double dropout_;
  std::uint64_t seed_;
};

/// Constant 1/C everywhere; never learns. Used for cost-only dry runs where
/// the selection heuristic does not consult the model.
class UniformPredictor final : public Predictor {
 public:
  explicit UniformPredictor(int classes = 2) : classes_(classes) {}

  std::string_view kind() const override { return "uniform"; }
  int classes() const override { return classes_; }
  double dropout() const override { return 0.0; }

  ProbMap predict(const ImageSlice& image) const override;
  std::vector<ProbMap> predict_samples(const ImageSlice& image, int count, std::uint64_t seed) const override;
  TrainReport train(std::span<const TrainExample> labeled, std::span<const ValExample> val,
                    const TrainConfig& config) override;
  void save(const std::filesystem::path& path) const override;
  std::unique_ptr<Predictor> clone() const override;

 private:
  int classes_;
};

/// "convnet" or "uniform".
std::unique_ptr<Predictor> make_predictor(std::string_view kind, int classes, double dropout, std::uint64_t seed);

/// Restores a predictor written by save().
std::unique_ptr<Predictor> load_predictor(const std::filesystem::path& path);

}  // namespace ral::nn
