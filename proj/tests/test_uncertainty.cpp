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
#include <random>

#include "nn_fixtures.hpp"
#include "ral/nn/predictor.hpp"
#include "ral/nn/trainer.hpp"
#include "ral/uncertainty/uncertainty.hpp"

using namespace ral;
using namespace ral::uncertainty;

namespace {

double h2(double a, double b) {
  const std::vector<double> p{a, b};
  return entropy(p);
}

ProbMap one_pixel(double a, double b) { return ProbMap(1, 1, 2, std::vector<double>{a, b}); }

}  // namespace

TEST_CASE("entropy examples") {
  CHECK(std::abs(h2(0.5, 0.5) - 0.693147) < 1e-6);
  CHECK(h2(1.0, 0.0) == 0.0);
  CHECK(std::abs(h2(0.25, 0.75) - 0.562335) < 1e-6);
  CHECK(entropy_map(one_pixel(0.5, 0.5), "a").values(0, 0) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("entropy bounds, maximum and symmetry") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double best = 0.0;
  for (int i = 0; i < 5000; ++i) {
    const double a = u(rng);
    const double h = h2(a, 1.0 - a);
    CHECK(h >= 0.0);
    CHECK(h <= std::log(2.0) + 1e-15);
    CHECK(h == doctest::Approx(h2(1.0 - a, a)).epsilon(1e-14));
    best = std::max(best, h);
  }
  CHECK(best < std::log(2.0));
  CHECK(best > std::log(2.0) - 1e-3);
  // Three classes: maximum ln 3 at uniform, permutation invariant.
  const std::vector<double> uni{1.0 / 3, 1.0 / 3, 1.0 / 3}, a{0.2, 0.3, 0.5}, b{0.5, 0.2, 0.3};
  CHECK(entropy(uni) == doctest::Approx(std::log(3.0)));
  CHECK(entropy(a) == doctest::Approx(entropy(b)).epsilon(1e-15));
}

TEST_CASE("mean estimator") {
  const std::vector<ProbMap> one{one_pixel(0.3, 0.7)};
  CHECK(mean_estimator(one) == one[0]);
  const std::vector<ProbMap> sym{one_pixel(1, 0), one_pixel(0, 1)};
  CHECK(mean_estimator(sym) == one_pixel(0.5, 0.5));
  const std::vector<ProbMap> avg{one_pixel(0.8, 0.2), one_pixel(0.6, 0.4)};
  const auto m = mean_estimator(avg);
  CHECK(m.at(0, 0, 0) == doctest::Approx(0.7));
  CHECK(m.at(0, 0, 1) == doctest::Approx(0.3));
  const std::vector<ProbMap> bad{one_pixel(0.5, 0.5), ProbMap(2, 1, 2, 0.5)};
  CHECK_THROWS_AS(mean_estimator(bad), InvalidArgument);
  CHECK_THROWS_AS(mean_estimator({}), InvalidArgument);
}

TEST_CASE("single-sample degeneracy and Jensen") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ProbMap> samples;
    for (int s = 0; s < 4; ++s) {
      const double a = u(rng);
      samples.push_back(one_pixel(a, 1.0 - a));
    }
    const std::vector<ProbMap> first{samples[0]};
    CHECK(entropy_map(mean_estimator(first)).values == entropy_map(samples[0]).values);
    double mean_h = 0.0;
    for (const auto& s : samples) mean_h += entropy_map(s).values(0, 0) / 4.0;
    CHECK(entropy_map(mean_estimator(samples)).values(0, 0) >= mean_h - 1e-12);
  }
}

TEST_CASE("MC samples: deterministic, rate zero is deterministic forward") {
  const auto img = fixtures::random_image(10, 10, 3);
  nn::ConvNetPredictor model = nn::ConvNetPredictor::reference(2, 0.5, 2);
  CHECK(mc_samples(model, img, 3, 11) == mc_samples(model, img, 3, 11));
  CHECK_THROWS_AS(mc_samples(model, img, 0, 1), InvalidArgument);

  nn::ConvNetPredictor no_dropout(model.model(), 0.0, 2);
  for (const auto& s : mc_samples(no_dropout, img, 3, 11)) CHECK(s == no_dropout.predict(img));
}

TEST_CASE("MC samples differ on a fitted toy net") {
  auto img = fixtures::random_image(8, 8, 5);
  auto labels = PartialLabelMask::unlabeled(img.id, 8, 8);
  labels.labels(1, 1) = 1;
  labels.labels(6, 6) = 0;
  const std::vector<nn::TrainExample> train{{&img, &labels, nn::LossKind::Point}};
  nn::TrainConfig cfg;
  cfg.learning_rate = 1e-3;
  cfg.max_epochs = 20;
  auto model = nn::ConvNetPredictor::reference(2, 0.5, 7);
  model.train(train, {}, cfg);
  const auto s = mc_samples(model, img, 2, 99);
  CHECK_FALSE(s[0] == s[1]);
  const auto e = mc_entropy(model, img, 8, 1);
  for (double v : e.values.values()) {
    CHECK(v >= 0.0);
    CHECK(v <= std::log(2.0));
  }
}

TEST_CASE("entropy rendering scales by ln C") {
  EntropyMap m{"x", Array2D<double>(1, 3, std::vector<double>{0.0, std::log(2.0) / 2, std::log(2.0)}), 2};
  const auto u8 = entropy_to_u8(m);
  CHECK(u8(0, 0) == 0);
  CHECK(u8(0, 1) == 128);
  CHECK(u8(0, 2) == 255);
}
