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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "nn_fixtures.hpp"
#include "ral/data/seed.hpp"
#include "ral/nn/adam.hpp"
#include "ral/nn/checkpoint.hpp"
#include "ral/nn/losses.hpp"
#include "ral/nn/network.hpp"
#include "ral/nn/predictor.hpp"
#include "ral/nn/trainer.hpp"
#include "temp_dir.hpp"

using namespace ral;
using namespace ral::nn;
using fixtures::random_image;
using fixtures::random_labels;
using fixtures::relative_error;

namespace {

ProbMap uniform_map(int h, int w, std::vector<double> infected) {
  ProbMap p(h, w, 2);
  for (int i = 0; i < h * w; ++i) {
    p.values()[2 * i] = 1.0 - infected[i];
    p.values()[2 * i + 1] = infected[i];
  }
  return p;
}

}  // namespace

TEST_CASE("forward produces normalized H x W x C maps for any size") {
  const auto params = init_reference(2, 1);
  for (auto [h, w] : {std::pair{1, 1}, {3, 7}, {16, 5}}) {
    const auto probs = forward(params, random_image(h, w, 3), DropoutOff{});
    CHECK(probs.height() == h);
    CHECK(probs.width() == w);
    CHECK(probs.classes() == 2);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const auto px = probs.pixel(r, c);
        CHECK(std::abs(px[0] + px[1] - 1.0) < 1e-6);
        CHECK(px[0] >= 0.0);
        CHECK(px[1] >= 0.0);
      }
    }
  }
}

TEST_CASE("zero final layer gives exactly one half") {
  auto params = init_reference(2, 4);
  params.weight(3).setZero();
  params.bias(3).setZero();
  const auto probs = forward(params, random_image(5, 5, 1), Stochastic{9, 0.5});
  for (double v : probs.values()) CHECK(v == 0.5);
}

TEST_CASE("dropout modes are deterministic and rate zero matches off") {
  const auto params = init_reference(2, 2);
  const auto img = random_image(9, 9, 2);
  CHECK(forward(params, img, Stochastic{5, 0.5}) == forward(params, img, Stochastic{5, 0.5}));
  CHECK_FALSE(forward(params, img, Stochastic{5, 0.5}) == forward(params, img, Stochastic{6, 0.5}));
  CHECK(forward(params, img, Stochastic{5, 0.0}) == forward(params, img, DropoutOff{}));
}

TEST_CASE("non-finite weights raise a numeric error") {
  auto params = init_reference(2, 2);
  params.values()[7] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(forward(params, random_image(4, 4, 1), DropoutOff{}), NumericError);
}

TEST_CASE("shared-trunk MC samples equal individual stochastic passes") {
  const auto params = init_reference(2, 8);
  const auto img = random_image(12, 10, 4);
  const auto samples = forward_samples(params, img.pixels, 4, 77, 0.5);
  REQUIRE(samples.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(samples[i] == forward(params, img, Stochastic{sample_seed(77, i), 0.5}));
}

TEST_CASE("dropout expectation matches the deterministic pass") {
  // Large layer-3 biases keep its ReLUs active and a small head keeps the
  // softmax near its linear regime, so E[output] ~ output at the mean.
  auto params = init_reference(2, 12);
  params.bias(2).setConstant(4.0);
  params.weight(3) *= 0.05;
  const auto img = random_image(6, 6, 5);
  const auto off = forward(params, img, DropoutOff{});
  const int n = 1000;
  const std::vector<std::pair<int, int>> pixels{{0, 0}, {2, 3}, {5, 5}, {3, 1}};
  std::vector<double> sum(pixels.size(), 0.0), sum_sq(pixels.size(), 0.0);
  for (int s = 0; s < n; ++s) {
    const auto p = forward(params, img, Stochastic{derive_seed(99, {static_cast<std::uint64_t>(s)}), 0.5});
    for (std::size_t k = 0; k < pixels.size(); ++k) {
      const double v = p.at(pixels[k].first, pixels[k].second, 1);
      sum[k] += v;
      sum_sq[k] += v * v;
    }
  }
  for (std::size_t k = 0; k < pixels.size(); ++k) {
    const double mean = sum[k] / n;
    const double var = sum_sq[k] / n - mean * mean;
    const double se = std::sqrt(var / n);
    CHECK(std::abs(mean - off.at(pixels[k].first, pixels[k].second, 1)) < 3.0 * se);
  }
}

TEST_CASE("point loss examples") {
  auto labels = PartialLabelMask::unlabeled("x", 1, 2);
  labels.labels(0, 0) = 1;
  CHECK(point_loss(uniform_map(1, 2, {1.0, 0.3}), labels) == 0.0);
  CHECK(point_loss(uniform_map(1, 2, {0.5, 0.3}), labels) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  labels.labels(0, 1) = 0;
  CHECK(point_loss(uniform_map(1, 2, {0.5, 0.75}), labels) == doctest::Approx(std::log(2.0) + std::log(4.0)));
  CHECK(point_loss(uniform_map(1, 2, {0.5, 0.3}), PartialLabelMask::unlabeled("x", 1, 2)) == 0.0);
  CHECK_THROWS_AS(point_loss(uniform_map(1, 2, {0.5, 0.3}), PartialLabelMask::unlabeled("x", 2, 1)),
                  InvalidArgument);
  // Clamp keeps the loss finite at probability zero.
  labels.labels(0, 1) = -1;
  CHECK(point_loss(uniform_map(1, 2, {0.0, 0.3}), labels) == doctest::Approx(-std::log(1e-12)));
}

TEST_CASE("point loss on a fully labeled image is plain cross-entropy") {
  const auto params = init_reference(2, 3);
  const auto img = random_image(6, 5, 3);
  const auto probs = forward(params, img, DropoutOff{});
  const auto labels = random_labels(6, 5, 1.0, 8);
  double ce = 0.0;
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 5; ++c) ce -= std::log(probs.at(r, c, labels.labels(r, c)));
  }
  CHECK(point_loss(probs, labels) == doctest::Approx(ce).epsilon(1e-12));
}

TEST_CASE("full supervision loss examples") {
  GroundTruthMask bg{"b", Array2D<std::uint8_t>(2, 2, 0)};
  const auto t = full_sup_terms(uniform_map(2, 2, {0.5, 0.5, 0.5, 0.5}), bg);
  CHECK(t.weighted_ce == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(t.iou == doctest::Approx(1.0 - 1.0 / 3.0).epsilon(1e-12));

  GroundTruthMask gt{"g", Array2D<std::uint8_t>(2, 2, std::vector<std::uint8_t>{1, 0, 0, 1})};
  const auto perfect = full_sup_terms(uniform_map(2, 2, {1.0, 0.0, 0.0, 1.0}), gt);
  CHECK(perfect.weighted_ce == 0.0);
  CHECK(perfect.iou == 0.0);
  CHECK(full_sup_loss(uniform_map(2, 2, {1.0, 0.0, 0.0, 1.0}), gt) == 0.0);
  CHECK_THROWS_AS(full_sup_loss(uniform_map(1, 2, {0.5, 0.5}), gt), InvalidArgument);
}

TEST_CASE("full supervision class weights have mean one") {
  // 1 infected, 3 background: weights 4/(2*1) = 2 and 4/(2*3) = 2/3.
  GroundTruthMask gt{"g", Array2D<std::uint8_t>(2, 2, std::vector<std::uint8_t>{1, 0, 0, 0})};
  const auto t = full_sup_terms(uniform_map(2, 2, {0.5, 0.5, 0.5, 0.5}), gt);
  CHECK(t.weighted_ce == doctest::Approx((2.0 + 3.0 * 2.0 / 3.0) * std::log(2.0) / 4.0));
}

TEST_CASE("loss gradients with respect to logits match central differences") {
  for (auto kind : {LossKind::Point, LossKind::FullSupervision}) {
    for (int inst = 0; inst < 10; ++inst) {
      const int h = 3 + inst % 3, w = 4;
      std::mt19937_64 rng(derive_seed(inst, {static_cast<std::uint64_t>(kind)}));
      std::normal_distribution<double> g(0.0, 1.5);
      RowMat logits(h * w, 2);
      for (Eigen::Index i = 0; i < logits.size(); ++i) logits.data()[i] = g(rng);
      const auto labels = random_labels(h, w, 0.7, inst + 100);
      auto loss_of = [&](const RowMat& z) {
        return map_loss(kind, to_prob_map(softmax_rows(z), h, w), labels).value;
      };
      const auto analytic = map_loss(kind, to_prob_map(softmax_rows(logits), h, w), labels).dlogits;
      std::vector<double> numeric(logits.size()), exact(logits.size());
      const double step = 1e-6;
      for (Eigen::Index i = 0; i < logits.size(); ++i) {
        RowMat plus = logits, minus = logits;
        plus.data()[i] += step;
        minus.data()[i] -= step;
        numeric[i] = (loss_of(plus) - loss_of(minus)) / (2 * step);
        exact[i] = analytic.data()[i];
      }
      CHECK(relative_error(exact, numeric) < 1e-4);
    }
  }
}

TEST_CASE("parameter gradients through the network match central differences") {
  for (auto kind : {LossKind::Point, LossKind::FullSupervision}) {
    for (int inst = 0; inst < 10; ++inst) {
      const auto params = init_reference(2, 500 + inst);
      const auto img = random_image(7, 6, 600 + inst);
      const auto labels = random_labels(7, 6, inst % 2 == 0 ? 0.15 : 0.8, 700 + inst);
      NetworkParams grad(params.layers());
      grad.set_zero();
      const TrainExample ex{&img, &labels, kind};
      const double loss = example_gradient(params, ex, DropoutOff{}, grad);
      CHECK(loss == doctest::Approx(fixtures::full_map_loss(params, img, labels, kind)).epsilon(1e-12));

      // Probe a deterministic subset of parameters from every layer.
      std::vector<double> exact, numeric;
      const double step = 1e-6;
      for (std::size_t i = inst % 7; i < params.values().size(); i += 37) {
        NetworkParams plus = params, minus = params;
        plus.values()[i] += step;
        minus.values()[i] -= step;
        numeric.push_back((fixtures::full_map_loss(plus, img, labels, kind) -
                           fixtures::full_map_loss(minus, img, labels, kind)) /
                          (2 * step));
        exact.push_back(grad.values()[i]);
      }
      CHECK(relative_error(exact, numeric) < 1e-4);
    }
  }
}

TEST_CASE("stochastic gradients match differences at a fixed mask") {
  const auto params = init_reference(2, 41);
  const auto img = random_image(6, 6, 42);
  const auto labels = random_labels(6, 6, 0.5, 43);
  const DropoutMode mode = Stochastic{1234, 0.5};
  NetworkParams grad(params.layers());
  grad.set_zero();
  const TrainExample ex{&img, &labels, LossKind::Point};
  example_gradient(params, ex, mode, grad);
  std::vector<double> exact, numeric;
  for (std::size_t i = 3; i < params.values().size(); i += 29) {
    NetworkParams plus = params, minus = params;
    plus.values()[i] += 1e-6;
    minus.values()[i] -= 1e-6;
    NetworkParams scratch(params.layers());
    const double lp = example_gradient(plus, ex, mode, scratch);
    const double lm = example_gradient(minus, ex, mode, scratch);
    numeric.push_back((lp - lm) / 2e-6);
    exact.push_back(grad.values()[i]);
  }
  CHECK(relative_error(exact, numeric) < 1e-4);
}

TEST_CASE("window planning covers labels with receptive-field margin") {
  auto labels = PartialLabelMask::unlabeled("w", 64, 64);
  CHECK(plan_windows(labels, 3).empty());
  labels.labels(10, 10) = 1;
  labels.labels(50, 52) = 0;
  const auto windows = plan_windows(labels, 3);
  REQUIRE(windows.size() == 2);
  CHECK(windows[0] == Rect{7, 7, 7, 7});
  CHECK(windows[1] == Rect{47, 49, 7, 7});
  labels = PartialLabelMask::unlabeled("w", 8, 8);
  labels.labels(0, 0) = 0;
  labels.labels(7, 7) = 1;
  CHECK(plan_windows(labels, 3) == std::vector<Rect>{Rect{0, 0, 8, 8}});
}

TEST_CASE("adam first step moves each parameter by the learning rate") {
  std::vector<double> p{1.0, -2.0, 0.5};
  const std::vector<double> g{0.3, -4.0, 0.0};
  AdamState s;
  adam_step(p, g, s, 0.01);
  CHECK(s.step == 1);
  CHECK(p[0] == doctest::Approx(0.99).epsilon(1e-6));
  CHECK(p[1] == doctest::Approx(-1.99).epsilon(1e-6));
  CHECK(p[2] == 0.5);
  std::vector<double> wrong(2);
  CHECK_THROWS_AS(adam_step(wrong, g, s, 0.01), InvalidArgument);
}

namespace {

struct TinySet {
  std::vector<ImageSlice> images;
  std::vector<PartialLabelMask> labels;
  std::vector<GroundTruthMask> masks;
  std::vector<TrainExample> train;
  std::vector<ValExample> val;
};

// Bright blob on noise; labels are the ground truth at a handful of points.
TinySet tiny_set(int n) {
  TinySet s;
  for (int i = 0; i < n; ++i) {
    auto img = random_image(12, 12, 900 + i);
    GroundTruthMask gt{img.id, Array2D<std::uint8_t>(12, 12, 0)};
    for (int r = 3 + i % 3; r < 8 + i % 3; ++r) {
      for (int c = 4; c < 9; ++c) {
        gt.classes(r, c) = 1;
        img.pixels(r, c) += 3.0;
      }
    }
    auto lab = PartialLabelMask::unlabeled(img.id, 12, 12);
    lab.labels(5 + i % 3, 6) = 1;
    lab.labels(0, 0) = 0;
    lab.labels(11, 2) = 0;
    lab.labels(1, 10) = 0;
    s.images.push_back(img);
    s.labels.push_back(lab);
    s.masks.push_back(gt);
  }
  for (int i = 0; i < n; ++i) {
    s.train.push_back({&s.images[i], &s.labels[i], LossKind::Point});
    s.val.push_back({&s.images[i], &s.masks[i]});
  }
  return s;
}

}  // namespace

TEST_CASE("train_cycle contracts") {
  auto set = tiny_set(3);
  TrainConfig cfg;
  cfg.learning_rate = 1e-3;
  cfg.max_epochs = 4;
  cfg.seed = 5;
  const Model start{init_reference(2, 1), {}};
  CHECK_THROWS_AS(train_cycle(start, {}, set.val, cfg), InvalidArgument);

  const auto a = train_cycle(start, set.train, {}, cfg);
  CHECK(a.epochs_run == 4);
  CHECK(a.best_epoch == 4);
  CHECK_FALSE(a.best_val_dice.has_value());
  CHECK_FALSE(a.model == start);
  CHECK(a.model.optimizer.step == 12);

  const auto b = train_cycle(start, set.train, {}, cfg);
  CHECK(a.model == b.model);

  const auto v = train_cycle(start, set.train, set.val, cfg);
  REQUIRE(v.best_val_dice.has_value());
  CHECK(*v.best_val_dice == doctest::Approx(validation_dice(v.model.params, set.val)));

  cfg.learning_rate = -1;
  CHECK_THROWS_AS(train_cycle(start, set.train, {}, cfg), InvalidArgument);
}

TEST_CASE("training loss trends downward on a frozen tiny set") {
  auto set = tiny_set(4);
  TrainConfig cfg;
  cfg.learning_rate = 1e-3;
  cfg.max_epochs = 30;
  cfg.seed = 3;
  const auto out = train_cycle(Model{init_reference(2, 2), {}}, set.train, {}, cfg);
  const auto& l = out.epoch_losses;
  const double head = (l[0] + l[1] + l[2]) / 3.0;
  const double tail = (l[27] + l[28] + l[29]) / 3.0;
  CHECK(tail < head);
}

TEST_CASE("non-finite training reports the epoch") {
  auto set = tiny_set(1);
  TrainConfig cfg;
  cfg.learning_rate = 1e300;
  cfg.max_epochs = 3;
  try {
    train_cycle(Model{init_reference(2, 2), {}}, set.train, {}, cfg);
    FAIL("expected a numeric error");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
  }
}

TEST_CASE("overfitting one image with four points") {
  auto img = random_image(8, 8, 31);
  auto labels = PartialLabelMask::unlabeled(img.id, 8, 8);
  labels.labels(1, 1) = 1;
  labels.labels(2, 6) = 0;
  labels.labels(5, 2) = 1;
  labels.labels(6, 6) = 0;
  const std::vector<TrainExample> train{{&img, &labels, LossKind::Point}};
  TrainConfig cfg;
  cfg.learning_rate = 1e-3;
  cfg.max_epochs = 200;
  cfg.seed = 1;
  const auto out = train_cycle(Model{init_reference(2, 3), {}}, train, {}, cfg);
  CHECK(out.model.optimizer.step == 200);
  const double loss = point_loss(forward(out.model.params, img, DropoutOff{}), labels);
  CHECK(loss < 0.05);
}

TEST_CASE("checkpoint round trip is bit exact") {
  TempDir dir;
  auto set = tiny_set(1);
  TrainConfig cfg;
  cfg.learning_rate = 1e-3;
  cfg.max_epochs = 2;
  const auto trained = train_cycle(Model{init_reference(2, 6), {}}, set.train, {}, cfg);
  const Checkpoint ckpt{trained.model, 0.5, 6};
  save_checkpoint(dir.path() / "m.json", ckpt);
  const auto back = load_checkpoint(dir.path() / "m.json");
  CHECK(back.model == trained.model);
  CHECK(back.seed == 6);
  const auto img = random_image(9, 9, 1);
  CHECK(forward(back.model.params, img, DropoutOff{}) == forward(trained.model.params, img, DropoutOff{}));

  auto text = checkpoint_to_json(ckpt);
  const auto pos = text.find("\"version\":1");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 11, "\"version\":9");
  CHECK_THROWS_AS(checkpoint_from_json(text), LoadError);
  CHECK_THROWS_AS(checkpoint_from_json("{"), LoadError);
  CHECK_THROWS_AS(load_checkpoint(dir.path() / "absent.json"), LoadError);
}

TEST_CASE("predictors") {
  TempDir dir;
  const auto img = random_image(5, 4, 2);
  UniformPredictor u;
  const auto flat = u.predict(img);
  for (double v : flat.values()) CHECK(v == 0.5);
  CHECK(u.predict_samples(img, 3, 1).size() == 3);
  u.save(dir.path() / "u.json");
  CHECK(load_predictor(dir.path() / "u.json")->kind() == "uniform");

  auto conv = make_predictor("convnet", 2, 0.5, 4);
  conv->save(dir.path() / "c.json");
  const auto loaded = load_predictor(dir.path() / "c.json");
  CHECK(loaded->kind() == "convnet");
  CHECK(loaded->predict(img) == conv->predict(img));
  CHECK(loaded->predict_samples(img, 2, 8) == conv->predict_samples(img, 2, 8));
  CHECK_THROWS_AS(make_predictor("vgg", 2, 0.5, 1), InvalidArgument);
}

TEST_CASE("validation ties advance the snapshot but not patience") {
  // Empty validation masks with all-background labels: every epoch scores
  // Dice 1 (empty vs empty), so epochs 2.. tie with epoch 1.
  auto set = tiny_set(2);
  for (auto& l : set.labels) {
    for (auto& v : l.labels.values()) v = v == kUnlabeled ? kUnlabeled : 0;
  }
  for (auto& m : set.masks) m.classes = Array2D<std::uint8_t>(12, 12, 0);
  TrainConfig cfg;
  cfg.learning_rate = 1e-2;
  cfg.max_epochs = 10;
  cfg.patience = 2;
  cfg.seed = 3;
  const auto out = train_cycle(Model{init_reference(2, 4), {}}, set.train, set.val, cfg);
  REQUIRE(out.best_val_dice.has_value());
  CHECK(*out.best_val_dice == 1.0);
  CHECK(out.epochs_run == 3);
  CHECK(out.best_epoch == 3);
}
