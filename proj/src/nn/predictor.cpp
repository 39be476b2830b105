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

#include "ral/nn/predictor.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ral/data/errors.hpp"
#include "ral/eval/metrics.hpp"
#include "ral/nn/network.hpp"

namespace ral::nn {

ConvNetPredictor::ConvNetPredictor(Model model, double dropout, std::uint64_t seed)
    : model_(std::move(model)), dropout_(dropout), seed_(seed) {
  if (dropout < 0.0 || dropout >= 1.0) throw InvalidArgument("predictor: dropout must be in [0, 1)");
}

ConvNetPredictor ConvNetPredictor::reference(int classes, double dropout, std::uint64_t seed) {
  return ConvNetPredictor(Model{init_reference(classes, seed), {}}, dropout, seed);
}

ProbMap ConvNetPredictor::predict(const ImageSlice& image) const {
  return forward(model_.params, image, DropoutOff{});
}

std::vector<ProbMap> ConvNetPredictor::predict_samples(const ImageSlice& image, int count, std::uint64_t seed) const {
  return forward_samples(model_.params, image.pixels, count, seed, dropout_);
}

TrainReport ConvNetPredictor::train(std::span<const TrainExample> labeled, std::span<const ValExample> val,
                                    const TrainConfig& config) {
  TrainConfig effective = config;
  effective.dropout = dropout_;
  auto outcome = train_cycle(model_, labeled, val, effective);
  model_ = std::move(outcome.model);
  return {outcome.best_val_dice, outcome.best_epoch, outcome.epochs_run};
}

void ConvNetPredictor::save(const std::filesystem::path& path) const {
  save_checkpoint(path, Checkpoint{model_, dropout_, seed_});
}

std::unique_ptr<Predictor> ConvNetPredictor::clone() const { return std::make_unique<ConvNetPredictor>(*this); }

ProbMap UniformPredictor::predict(const ImageSlice& image) const {
  return ProbMap(image.height(), image.width(), classes_, 1.0 / classes_);
}

std::vector<ProbMap> UniformPredictor::predict_samples(const ImageSlice& image, int count, std::uint64_t) const {
  if (count < 1) throw InvalidArgument("predict_samples: count must be >= 1");
  return std::vector<ProbMap>(static_cast<std::size_t>(count), predict(image));
}

TrainReport UniformPredictor::train(std::span<const TrainExample> labeled, std::span<const ValExample> val,
                                    const TrainConfig& config) {
  config.validate();
  if (labeled.empty()) throw InvalidArgument("train: no labeled images");
  TrainReport report;
  if (!val.empty()) {
    eval::ConfusionCounts counts;
    for (const auto& v : val) counts += eval::confusion(argmax_mask(predict(*v.image)), v.mask->classes);
    report.best_val_dice = eval::dice(counts);
  }
  return report;
}

void UniformPredictor::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("predictor: cannot write " + path.string());
  out << nlohmann::json{{"format", "ral-uniform"}, {"version", 1}, {"classes", classes_}}.dump();
}

std::unique_ptr<Predictor> UniformPredictor::clone() const { return std::make_unique<UniformPredictor>(*this); }

std::unique_ptr<Predictor> make_predictor(std::string_view kind, int classes, double dropout, std::uint64_t seed) {
  if (kind == "convnet") return std::make_unique<ConvNetPredictor>(ConvNetPredictor::reference(classes, dropout, seed));
  if (kind == "uniform") return std::make_unique<UniformPredictor>(classes);
  throw InvalidArgument("unknown model kind '" + std::string(kind) + "'");
}

std::unique_ptr<Predictor> load_predictor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("predictor: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  nlohmann::json head;
  try {
    head = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw LoadError("predictor: malformed file " + path.string());
  }
  const std::string format = head.value("format", "");
  if (format == "ral-uniform") return std::make_unique<UniformPredictor>(head.value("classes", 2));
  auto ckpt = checkpoint_from_json(text);
  return std::make_unique<ConvNetPredictor>(std::move(ckpt.model), ckpt.dropout, ckpt.seed);
}

}  // namespace ral::nn
