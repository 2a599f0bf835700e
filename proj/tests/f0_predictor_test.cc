// Copyright 2026 The sfgan Authors
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

#include <algorithm>
#include <cmath>
#include <cstring>

#include "doctest.h"
#include "sfgan/f0_predictor.h"
#include "test_util.h"

using namespace sfgan;
using sfgan::testing::random_tensor;

namespace {

F0Example example_from(const std::vector<float>& audio) {
  AnalysisConfig a;
  return {mel_spectrogram(audio, a), extract_f0(audio, a)};
}

bool same_bits(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape() &&
         std::equal(a.data().begin(), a.data().end(), b.data().begin(),
                    [](float x, float y) { return std::memcmp(&x, &y, sizeof(float)) == 0; });
}

}  // namespace

TEST_CASE("output depends only on the low mel bands") {
  F0Predictor model({}, 4);
  std::mt19937_64 r(2);
  Tensor mel = random_tensor(Shape{2, 80, 37}, r, -8.0, 2.0);
  Tensor other = mel;
  for (int64_t b = 0; b < 2; ++b)
    for (int64_t m = 10; m < 80; ++m)
      for (int64_t l = 0; l < 37; ++l) other.at(b, m, l) += 5.0f * std::sin(float(m * l + b));
  Graph g;
  g.freeze(model.params());
  auto a = model.forward(g, g.constant(mel));
  auto b = model.forward(g, g.constant(other));
  CHECK(same_bits(a.f0.value(), b.f0.value()));
  CHECK(same_bits(a.logit.value(), b.logit.value()));

  Tensor low = mel;
  low.at(0, 3, 5) += 1.0f;
  auto c = model.forward(g, g.constant(low));
  CHECK_FALSE(same_bits(c.logit.value(), a.logit.value()));
  CHECK_THROWS_AS(model.forward(g, g.constant(Tensor(Shape{1, 9, 4}))), std::invalid_argument);
}

TEST_CASE("output shapes and non-negative F0") {
  F0Predictor model({}, 1);
  std::mt19937_64 r(3);
  Graph g;
  auto out = model.forward(g, g.constant(random_tensor(Shape{1, 80, 50}, r, -8.0, 2.0)));
  CHECK(out.f0.shape() == Shape{1, 1, 50});
  CHECK(out.logit.shape() == Shape{1, 1, 50});
  for (float v : out.f0.value().data()) CHECK(v >= 0.0f);
}

TEST_CASE("zeroed heads predict all frames unvoiced") {
  F0Predictor model({}, 1);
  for (auto& p : model.params()) {
    if (p->name.find("head") != std::string::npos) p->value.fill(0.0f);
  }
  MelSpectrogram mel(20, 80);
  std::fill(mel.values.begin(), mel.values.end(), 1.0f);
  F0Track t = model.predict(mel);
  REQUIRE(t.size() == 20);
  for (size_t l = 0; l < t.size(); ++l) {
    CHECK(t.vuv[l] == 0);
    CHECK(t.f0[l] == 0.0f);
  }
}

TEST_CASE("loss matches a direct recomputation") {
  F0Predictor model({}, 6);
  std::mt19937_64 r(5);
  Tensor mel = random_tensor(Shape{1, 80, 12}, r, -5.0, 1.0);
  model.set_f0_bias(150.0f);
  F0Track target;
  for (int l = 0; l < 12; ++l) {
    target.vuv.push_back(l % 3 != 0);
    target.f0.push_back(target.vuv.back() ? 100.0f + 10.0f * l : 0.0f);
  }
  Graph g;
  auto out = model.forward(g, g.constant(mel));
  const double loss = f0_predictor_loss(out, target, 1e-4f).value()[0];
  double mse = 0.0, bce = 0.0;
  int voiced = 0;
  for (int l = 0; l < 12; ++l) {
    const double f = out.f0.value()[l], z = out.logit.value()[l];
    const double y = target.vuv[l];
    if (y) {
      mse += (f - target.f0[l]) * (f - target.f0[l]);
      ++voiced;
    }
    bce += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::fabs(z)));
  }
  CHECK(loss == doctest::Approx(1e-4 * mse / voiced + bce / 12).epsilon(1e-5));

  F0Track silent{std::vector<float>(12, 0.0f), std::vector<uint8_t>(12, 0)};
  CHECK(f0_predictor_loss(out, silent, 1e-4f).value()[0] >= 0.0f);
  F0Track wrong{std::vector<float>(5, 0.0f), std::vector<uint8_t>(5, 0)};
  CHECK_THROWS_AS(f0_predictor_loss(out, wrong, 1e-4f), std::invalid_argument);
}

TEST_CASE("gradient check through the predictor") {
  F0PredictorConfig cfg;
  cfg.channels = 3;
  F0Predictor model(cfg, 8);
  model.set_f0_bias(0.5f);
  std::mt19937_64 r(6);
  Tensor mel = random_tensor(Shape{1, 12, 9}, r);
  // Soft targets keep both loss terms active.
  F0Track target;
  for (int l = 0; l < 9; ++l) {
    target.vuv.push_back(l % 2);
    target.f0.push_back(l % 2 ? 1.0f + 0.1f * l : 0.0f);
  }
  auto res = sfgan::testing::grad_check(
      model.params(),
      [&](Graph& g, ParameterStore&) {
        return f0_predictor_loss(model.forward(g, g.constant(mel)), target, 1.0f);
      },
      1e-3);
  CHECK(res.checked > 100);
  CHECK(res.max_rel_error < 1e-3);
}

TEST_CASE("vuv accuracy") {
  F0Track a{{0, 100, 120, 0}, {0, 1, 1, 0}};
  F0Track b{{0, 100, 0, 110}, {0, 1, 0, 1}};
  CHECK(vuv_accuracy(a, a) == 1.0);
  CHECK(vuv_accuracy(a, b) == 0.5);
  CHECK_THROWS_AS(vuv_accuracy(a, F0Track{}), std::invalid_argument);
}

TEST_CASE("single utterance overfit and best-so-far selection") {
  auto audio = sfgan::testing::synthetic_utterance(1.0, 22050, 1);
  std::vector<F0Example> data{example_from(audio)};
  F0Predictor model({}, 2);
  F0TrainConfig cfg;
  cfg.steps = 600;
  auto report = train_f0_predictor(model, data, {}, cfg, 3);
  REQUIRE(report.train_loss.size() == 600);
  CHECK(report.eval_loss.size() == 13);
  for (double v : report.train_loss) CHECK(std::isfinite(v));
  CHECK(report.best_eval_loss == *std::min_element(report.eval_loss.begin(),
                                                   report.eval_loss.end()));
  CHECK(report.best_eval_loss < report.eval_loss.front());

  // Model holds the best weights.
  Graph g;
  g.freeze(model.params());
  auto out = model.forward(g, g.constant(mel_to_tensor(data[0].mel)));
  CHECK(f0_predictor_loss(out, data[0].f0, cfg.f0_loss_scale).value()[0] ==
        doctest::Approx(report.best_eval_loss).epsilon(1e-6));

  const double acc = vuv_accuracy(model.predict(data[0].mel), data[0].f0);
  MESSAGE("V/UV accuracy after 600 steps: " << acc);
  CHECK(acc > 0.95);
}

TEST_CASE("training is reproducible under a seed") {
  auto audio = sfgan::testing::synthetic_utterance(0.5, 22050, 3);
  std::vector<F0Example> data{example_from(audio)};
  F0TrainConfig cfg;
  cfg.steps = 20;
  cfg.max_frames = 16;
  F0Predictor a({}, 2), b({}, 2);
  auto ra = train_f0_predictor(a, data, {}, cfg, 9);
  auto rb = train_f0_predictor(b, data, {}, cfg, 9);
  CHECK(ra.train_loss == rb.train_loss);
  CHECK_THROWS_AS(train_f0_predictor(a, {}, {}, cfg, 9), std::invalid_argument);
}
