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

#include <cmath>
#include <cstring>
#include <fstream>

#include "doctest.h"
#include "sfgan/losses.h"
#include "sfgan/trainer.h"
#include "test_util.h"

using namespace sfgan;
using sfgan::testing::random_tensor;

namespace {

RunConfig toy_config() {
  RunConfig c = RunConfig::from_preset("toy");
  c.seed = 11;
  return c;
}

std::vector<Utterance> toy_data(const RunConfig& c, int n = 1) {
  std::vector<Utterance> data;
  for (int i = 0; i < n; ++i) {
    auto x = sfgan::testing::synthetic_utterance(0.4, c.analysis.sample_rate, 20 + i);
    data.push_back(make_utterance("u" + std::to_string(i), x, c.analysis,
                                  c.training.segment_frames));
  }
  return data;
}

bool same_bits(const ParameterStore& a, const ParameterStore& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    const Tensor& x = a[i].value;
    const Tensor& y = b[i].value;
    if (a[i].name != b[i].name || x.shape() != y.shape()) return false;
    if (std::memcmp(x.data().data(), y.data().data(), x.numel() * sizeof(float)) != 0) {
      return false;
    }
  }
  return true;
}

bool all_zero_grad(const ParameterStore& s) {
  for (const auto& p : s) {
    for (float v : p->grad.data()) {
      if (v != 0.0f) return false;
    }
  }
  return true;
}

DiscriminatorOutput constant_output(Graph& g, const std::vector<Tensor>& scores,
                                    const std::vector<std::vector<Tensor>>& feats) {
  DiscriminatorOutput out;
  for (const auto& s : scores) out.scores.push_back(g.constant(s));
  for (const auto& f : feats) {
    std::vector<Var> v;
    for (const auto& t : f) v.push_back(g.constant(t));
    out.features.push_back(v);
  }
  return out;
}

}  // namespace

TEST_CASE("fold_period examples") {
  Graph g;
  Tensor x(Shape{1, 1, 6}, std::vector<float>{0, 1, 2, 3, 4, 5});
  Tensor f = ops::fold_period(g.constant(x), 2).value();
  CHECK(f.shape() == Shape{2, 1, 3});
  CHECK(f.at(0, 0, 0) == 0.0f);
  CHECK(f.at(0, 0, 2) == 4.0f);
  CHECK(f.at(1, 0, 0) == 1.0f);
  CHECK(f.at(1, 0, 2) == 5.0f);
  CHECK_THROWS_AS(ops::fold_period(g.constant(Tensor(Shape{1, 1, 7})), 3), std::invalid_argument);
  Tensor p = ops::pad_time(g.constant(Tensor(Shape{1, 1, 7}, 1.0f)), 0, 2).value();
  CHECK(p.length() == 9);
  CHECK(p.at(0, 0, 8) == 0.0f);
}

TEST_CASE("discriminator layout") {
  Discriminator d(DiscriminatorConfig::toy(), 3);
  CHECK(d.count() == 8);
  std::mt19937_64 r(1);
  Graph g;
  g.freeze(d.params());
  for (int64_t len : {7, 100, 1000}) {
    auto out = d.forward(g, g.constant(random_tensor(Shape{2, 1, len}, r)));
    REQUIRE(out.scores.size() == 8);
    REQUIRE(out.features.size() == 8);
    for (size_t k = 0; k < 5; ++k) {
      const int p = d.config().periods[k];
      CHECK(out.features[k].size() == 6);
      // folded batch rows
      CHECK(out.scores[k].value().batch() == 2 * p);
      for (float v : out.scores[k].value().data()) CHECK(std::isfinite(v));
    }
    for (size_t k = 5; k < 8; ++k) CHECK(out.features[k].size() == 8);
  }
  CHECK_THROWS_AS(d.forward(g, g.constant(Tensor(Shape{1, 2, 10}))), std::invalid_argument);
}

TEST_CASE("second scale sees the average-pooled signal") {
  auto cfg = DiscriminatorConfig::toy();
  cfg.periods = {};
  cfg.scales = 2;
  Discriminator d(cfg, 5);
  auto single = cfg;
  single.scales = 1;
  // Same weights on scale 1 of a two-scale model and a one-scale model fed
  // pooled audio.
  Discriminator one(single, 5);
  for (auto& p : one.params()) {
    std::string name = p->name;
    name.replace(name.find("msd.s0"), 6, "msd.s1");
    p->value = d.params().get(name).value;
  }
  std::mt19937_64 r(4);
  Tensor x = random_tensor(Shape{1, 1, 200}, r);
  Tensor pooled(Shape{1, 1, 100});
  for (int64_t t = 0; t < 100; ++t) {
    double acc = 0.0;
    for (int64_t k = 0; k < 4; ++k) {
      const int64_t i = 2 * t + k - 1;
      if (i >= 0 && i < 200) acc += x.at(0, 0, i);
    }
    pooled.at(0, 0, t) = static_cast<float>(acc / 4.0);
  }
  Graph g;
  g.freeze(d.params());
  g.freeze(one.params());
  Tensor a = d.forward(g, g.constant(x)).scores[1].value();
  Tensor b = one.forward(g, g.constant(pooled)).scores[0].value();
  REQUIRE(a.shape() == b.shape());
  for (int64_t i = 0; i < a.numel(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-5));
}

TEST_CASE("adversarial losses at their optima") {
  Graph g;
  Shape s{1, 1, 5};
  auto real = constant_output(g, {Tensor(s, 1.0f), Tensor(s, 1.0f)}, {{Tensor(s, 0.3f)}, {}});
  auto fake = constant_output(g, {Tensor(s, 0.0f), Tensor(s, 0.0f)}, {{Tensor(s, 0.3f)}, {}});
  CHECK(discriminator_adv_loss(real, fake).value()[0] == 0.0f);
  CHECK(generator_adv_loss(real).value()[0] == 0.0f);
  CHECK(feature_matching_loss(real, fake).value()[0] == 0.0f);
  CHECK(generator_adv_loss(fake).value()[0] == doctest::Approx(2.0));
}

TEST_CASE("losses match a direct recomputation") {
  std::mt19937_64 r(9);
  std::vector<Tensor> sr, sf;
  std::vector<std::vector<Tensor>> fr, ff;
  for (int k = 0; k < 3; ++k) {
    Shape s{1 + k, 1, 4 + 3 * k};
    sr.push_back(random_tensor(s, r));
    sf.push_back(random_tensor(s, r));
    fr.push_back({random_tensor(Shape{1, 2, 3 + k}, r), random_tensor(s, r)});
    ff.push_back({random_tensor(Shape{1, 2, 3 + k}, r), random_tensor(s, r)});
  }
  double d_adv = 0.0, g_adv = 0.0, fm = 0.0;
  for (int k = 0; k < 3; ++k) {
    double a = 0.0, b = 0.0, c = 0.0;
    for (int64_t i = 0; i < sr[k].numel(); ++i) {
      a += std::pow(sr[k][i] - 1.0, 2);
      b += std::pow(double(sf[k][i]), 2);
      c += std::pow(sf[k][i] - 1.0, 2);
    }
    d_adv += (a + b) / sr[k].numel();
    g_adv += c / sr[k].numel();
    for (size_t m = 0; m < fr[k].size(); ++m) {
      double acc = 0.0;
      for (int64_t i = 0; i < fr[k][m].numel(); ++i) acc += std::fabs(fr[k][m][i] - ff[k][m][i]);
      fm += acc / fr[k][m].numel();
    }
  }
  Graph g;
  auto real = constant_output(g, sr, fr);
  auto fake = constant_output(g, sf, ff);
  CHECK(discriminator_adv_loss(real, fake).value()[0] == doctest::Approx(d_adv).epsilon(1e-5));
  CHECK(generator_adv_loss(fake).value()[0] == doctest::Approx(g_adv).epsilon(1e-5));
  CHECK(feature_matching_loss(real, fake).value()[0] == doctest::Approx(fm).epsilon(1e-5));

  auto short_out = constant_output(g, {sr[0]}, {fr[0]});
  CHECK_THROWS_AS(discriminator_adv_loss(short_out, fake), std::invalid_argument);
}

TEST_CASE("frozen stores receive no gradient") {
  RunConfig c = toy_config();
  Generator gen(c.generator, c.effective_source(), c.seed);
  Discriminator disc(c.discriminator, c.seed);
  auto data = toy_data(c);
  const Utterance& u = data[0];
  const int hop = c.analysis.hop;
  const auto f = upsample_f0(u.f0, hop);
  const auto v = upsample_vuv(u.f0.vuv, hop);
  Rng rng = make_rng(1);
  SourceNoise n = draw_source_noise(rng, f.size(), c.source.sigma);

  for (auto& p : gen.params()) p->grad.fill(0.0f);
  for (auto& p : disc.params()) p->grad.fill(0.0f);
  {
    Graph g;
    Var fake = gen.synthesize(g, mel_to_tensor(u.mel), f, v, std::span(&n, 1));
    Graph gd;
    gd.freeze(gen.params());
    Var real = gd.constant(Tensor(Shape{1, 1, int64_t(u.audio.size())}, u.audio));
    Var loss = discriminator_adv_loss(disc.forward(gd, real),
                                      disc.forward(gd, gd.constant(fake.value())));
    gd.backward(loss);
    CHECK(all_zero_grad(gen.params()));
    CHECK_FALSE(all_zero_grad(disc.params()));
  }
  disc.params().zero_grad();
  {
    Graph g;
    g.freeze(disc.params());
    Var fake = gen.synthesize(g, mel_to_tensor(u.mel), f, v, std::span(&n, 1));
    Var loss = generator_adv_loss(disc.forward(g, fake));
    g.backward(loss);
    CHECK(all_zero_grad(disc.params()));
    CHECK_FALSE(all_zero_grad(gen.params()));
  }
}

TEST_CASE("zero training steps change nothing") {
  RunConfig c = toy_config();
  Trainer a(c);
  Trainer b(c);
  a.run(toy_data(c), 0);
  CHECK(same_bits(a.generator().params(), b.generator().params()));
  CHECK(same_bits(a.discriminator().params(), b.discriminator().params()));
  CHECK(a.history().empty());
}

TEST_CASE("a training step updates both networks with finite losses") {
  RunConfig c = toy_config();
  Trainer t(c);
  ParameterStore g0 = t.generator().params();
  ParameterStore d0 = t.discriminator().params();
  StepRecord r = t.step(toy_data(c));
  CHECK(r.finite());
  CHECK_FALSE(r.skipped);
  CHECK(r.g_total == doctest::Approx(r.g_adv + 2.0 * r.fm + 45.0 * r.mel).epsilon(1e-5));
  CHECK_FALSE(same_bits(g0, t.generator().params()));
  CHECK_FALSE(same_bits(d0, t.discriminator().params()));
  CHECK(t.step_count() == 1);
}

TEST_CASE("learning rate decays once per epoch") {
  RunConfig c = toy_config();
  c.training.batch_size = 4;
  Trainer t(c);
  const double lr0 = c.training.optimizer.lr;
  // 10 clips at batch 4 -> 3 steps per epoch
  CHECK(t.learning_rate(0, 10) == doctest::Approx(lr0));
  CHECK(t.learning_rate(2, 10) == doctest::Approx(lr0));
  CHECK(t.learning_rate(3, 10) == doctest::Approx(lr0 * 0.999));
  CHECK(t.learning_rate(7, 10) == doctest::Approx(lr0 * 0.999 * 0.999));
}

TEST_CASE("training rejects clips shorter than a segment") {
  RunConfig c = toy_config();
  Trainer t(c);
  auto x = sfgan::testing::synthetic_utterance(0.1, c.analysis.sample_rate, 1);
  std::vector<Utterance> data{make_utterance("short", x, c.analysis)};
  CHECK_THROWS_AS(t.step(data), std::invalid_argument);
  CHECK_THROWS_AS(t.step({}), std::invalid_argument);
}

TEST_CASE("resume from a checkpoint is bit-identical") {
  sfgan::testing::TempDir dir;
  RunConfig c = toy_config();
  auto data = toy_data(c, 2);
  Trainer a(c);
  a.run(data, 3);
  a.save(dir.path("ckpt.bin"));
  a.run(data, 10);

  Trainer b = Trainer::from_checkpoint(dir.path("ckpt.bin"));
  CHECK(b.step_count() == 3);
  REQUIRE(b.history().size() == 3);
  b.run(data, 10);
  CHECK(same_bits(a.generator().params(), b.generator().params()));
  CHECK(same_bits(a.discriminator().params(), b.discriminator().params()));
  REQUIRE(a.history().size() == b.history().size());
  for (size_t i = 0; i < a.history().size(); ++i) {
    CHECK(a.history()[i].g_total == b.history()[i].g_total);
    CHECK(a.history()[i].d_adv == b.history()[i].d_adv);
  }
}

TEST_CASE("checkpoint round trip and validation") {
  sfgan::testing::TempDir dir;
  RunConfig c = toy_config();
  c.generator.pc_resblock_enabled = false;
  Trainer a(c);
  a.run(toy_data(c), 1);
  a.f0_predictor().emplace(c.f0_predictor, 3);
  a.save(dir.path("a.bin"));
  Trainer b = Trainer::from_checkpoint(dir.path("a.bin"));
  CHECK(b.config().dump() == a.config().dump());
  CHECK(same_bits(a.generator().params(), b.generator().params()));
  CHECK(same_bits(a.discriminator().params(), b.discriminator().params()));
  REQUIRE(b.f0_predictor().has_value());
  CHECK(same_bits(a.f0_predictor()->params(), b.f0_predictor()->params()));
  CHECK(b.generator_optimizer().step_count() == 1);
  b.save(dir.path("b.bin"));
  std::ifstream fa(dir.path("a.bin"), std::ios::binary), fb(dir.path("b.bin"), std::ios::binary);
  std::string sa((std::istreambuf_iterator<char>(fa)), {});
  std::string sb((std::istreambuf_iterator<char>(fb)), {});
  CHECK(sa == sb);

  // Shape mismatch is reported.
  BlobFile file = BlobFile::load(dir.path("a.bin"));
  Generator other(GeneratorConfig::v2(), c.effective_source(), 1);
  CHECK_THROWS_AS(read_parameters(file, "gen/", other.params()), CheckpointError);

  std::ofstream(dir.path("junk.bin")) << "not a checkpoint";
  CHECK_THROWS_AS(Trainer::from_checkpoint(dir.path("junk.bin")), CheckpointError);
  CHECK_THROWS_AS(Trainer::from_checkpoint(dir.path("missing.bin")), CheckpointError);
}

TEST_CASE("config JSON round trip and presets") {
  for (const char* name : {"v1", "v2", "toy"}) {
    RunConfig c = RunConfig::from_preset(name);
    CHECK_NOTHROW(c.validate());
    CHECK(RunConfig::parse(c.dump()).dump() == c.dump());
  }
  RunConfig toy = RunConfig::from_preset("toy");
  CHECK(toy.training.batch_size == 1);
  CHECK(toy.generator.h_u == 32);
  CHECK(RunConfig::from_preset("v1").training.batch_size == 16);
  CHECK(RunConfig::from_preset("v2").generator.h_u == 128);

  RunConfig o = RunConfig::parse(
      R"({"preset":"toy","seed":5,"ablation":{"no_dnn":true},"training":{"optimizer":{"lr":0.5}}})");
  CHECK(o.seed == 5);
  CHECK(o.no_dnn());
  CHECK_FALSE(o.no_subblock());
  CHECK(o.training.optimizer.lr == 0.5f);
  CHECK(o.generator.h_u == 32);
  CHECK(RunConfig::parse(o.dump()).dump() == o.dump());
}

TEST_CASE("config errors name the offending key") {
  auto message = [](const std::string& text) {
    try {
      RunConfig::parse(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message(R"({"training":{"batchsize":2}})").find("batchsize") != std::string::npos);
  CHECK(message(R"({"training":{"batchsize":2}})").find("config.training") != std::string::npos);
  CHECK(message(R"({"bogus":1})").find("bogus") != std::string::npos);
  CHECK(message(R"({"preset":"huge"})").find("huge") != std::string::npos);
  CHECK(message(R"({"seed":"x"})").find("seed") != std::string::npos);
  CHECK_FALSE(message("{").empty());
  CHECK_FALSE(message(R"({"analysis":{"hop":128}})").empty());
  CHECK_FALSE(message(R"({"f0_predictor":{"input_dims":81}})").empty());
}
