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

#include "sfgan/trainer.h"

#include <cmath>
#include <stdexcept>

#include "sfgan/losses.h"

namespace sfgan {

namespace {

constexpr uint64_t kPurposeStep = 0x73746570;
constexpr uint64_t kPurposeEval = 0x6576616c;

struct Batch {
  Tensor mel;
  Tensor audio;
  std::vector<float> f0;
  std::vector<uint8_t> vuv;
  std::vector<SourceNoise> draws;
};

Batch sample_batch(const std::vector<Utterance>& data, const RunConfig& cfg, Rng& rng) {
  const int64_t B = cfg.training.batch_size;
  const int64_t frames = cfg.training.segment_frames;
  const int hop = cfg.analysis.hop;
  const int64_t n_mels = cfg.analysis.n_mels;
  Batch batch;
  batch.mel = Tensor(Shape{B, n_mels, frames});
  batch.audio = Tensor(Shape{B, 1, frames * hop});
  std::uniform_int_distribution<size_t> pick(0, data.size() - 1);
  for (int64_t b = 0; b < B; ++b) {
    const Utterance& u = data[pick(rng)];
    const int64_t start = std::uniform_int_distribution<int64_t>(0, u.mel.rows - frames)(rng);
    for (int64_t m = 0; m < n_mels; ++m) {
      for (int64_t l = 0; l < frames; ++l) batch.mel.at(b, m, l) = u.mel.at(start + l, m);
    }
    std::copy_n(u.audio.begin() + start * hop, frames * hop, &batch.audio.at(b, 0, 0));
    F0Track crop;
    crop.f0.assign(u.f0.f0.begin() + start, u.f0.f0.begin() + start + frames);
    crop.vuv.assign(u.f0.vuv.begin() + start, u.f0.vuv.begin() + start + frames);
    const auto f = upsample_f0(crop, hop);
    const auto v = upsample_vuv(crop.vuv, hop);
    batch.f0.insert(batch.f0.end(), f.begin(), f.end());
    batch.vuv.insert(batch.vuv.end(), v.begin(), v.end());
  }
  for (int64_t b = 0; b < B; ++b) {
    batch.draws.push_back(draw_source_noise(rng, frames * hop, cfg.source.sigma));
  }
  return batch;
}

}  // namespace

Utterance make_utterance(std::string name, std::span<const float> samples,
                         const AnalysisConfig& analysis, int64_t min_frames) {
  if (samples.empty()) throw std::invalid_argument("utterance '" + name + "' is empty");
  const int64_t frames =
      std::max(frame_count(static_cast<int64_t>(samples.size()), analysis.hop), min_frames);
  Utterance u;
  u.name = std::move(name);
  u.audio.assign(static_cast<size_t>(frames * analysis.hop), 0.0f);
  std::copy(samples.begin(), samples.end(), u.audio.begin());
  u.mel = mel_spectrogram(u.audio, analysis);
  u.f0 = extract_f0(u.audio, analysis);
  return u;
}

bool StepRecord::finite() const {
  return std::isfinite(d_adv) && std::isfinite(g_adv) && std::isfinite(fm) &&
         std::isfinite(mel) && std::isfinite(g_total);
}

Trainer::Trainer(const RunConfig& cfg)
    : cfg_(cfg),
      gen_(cfg.generator, cfg.effective_source(), cfg.seed),
      disc_(cfg.discriminator, cfg.seed),
      opt_g_(cfg.training.optimizer),
      opt_d_(cfg.training.optimizer),
      analyzer_(std::make_unique<MelAnalyzer>(cfg.analysis)) {
  cfg_.validate();
}

double Trainer::learning_rate(int64_t step, size_t dataset_size) const {
  const int64_t B = cfg_.training.batch_size;
  const int64_t per_epoch = std::max<int64_t>(1, (static_cast<int64_t>(dataset_size) + B - 1) / B);
  return cfg_.training.optimizer.lr * std::pow(cfg_.training.lr_decay, double(step / per_epoch));
}

StepRecord Trainer::step(const std::vector<Utterance>& data) {
  if (data.empty()) throw std::invalid_argument("train: empty dataset");
  for (const Utterance& u : data) {
    if (u.mel.rows < cfg_.training.segment_frames) {
      throw std::invalid_argument("train: utterance '" + u.name +
                                  "' is shorter than the training segment");
    }
  }
  StepRecord rec;
  rec.step = step_;
  Rng rng = make_rng(cfg_.seed, kPurposeStep, static_cast<uint64_t>(step_));
  Batch batch = sample_batch(data, cfg_, rng);
  const float lr = static_cast<float>(learning_rate(step_, data.size()));
  opt_g_.set_lr(lr);
  opt_d_.set_lr(lr);

  Graph gg;
  Var fake = gen_.synthesize(gg, batch.mel, batch.f0, batch.vuv, batch.draws);

  {
    Graph gd;
    gd.freeze(gen_.params());
    Var real = gd.constant(batch.audio);
    Var detached = gd.constant(fake.value());
    Var loss = discriminator_adv_loss(disc_.forward(gd, real), disc_.forward(gd, detached));
    rec.d_adv = loss.value()[0];
    if (std::isfinite(rec.d_adv)) {
      disc_.params().zero_grad();
      gd.backward(loss);
      if (!opt_d_.step(disc_.params())) rec.skipped = true;
    } else {
      rec.skipped = true;
    }
  }

  gg.freeze(disc_.params());
  Var real = gg.constant(batch.audio);
  DiscriminatorOutput d_real = disc_.forward(gg, real);
  DiscriminatorOutput d_fake = disc_.forward(gg, fake);
  Var adv = generator_adv_loss(d_fake);
  Var fm = feature_matching_loss(d_real, d_fake);
  Var mel = l1_loss(analyzer_->forward(real), analyzer_->forward(fake));
  const LossWeights& w = cfg_.training.weights;
  Var total = ops::add_n({adv, ops::scale(fm, w.fm), ops::scale(mel, w.mel)});
  rec.g_adv = adv.value()[0];
  rec.fm = fm.value()[0];
  rec.mel = mel.value()[0];
  rec.g_total = total.value()[0];
  if (std::isfinite(rec.g_total)) {
    gen_.params().zero_grad();
    gg.backward(total);
    if (!opt_g_.step(gen_.params())) rec.skipped = true;
  } else {
    rec.skipped = true;
  }
  ++step_;
  history_.push_back(rec);
  return rec;
}

void Trainer::run(const std::vector<Utterance>& data, int64_t steps,
                  const std::function<void(const StepRecord&)>& on_step) {
  for (int64_t i = 0; i < steps; ++i) {
    StepRecord rec = step(data);
    if (on_step) on_step(rec);
  }
}

double Trainer::mel_loss(const Utterance& u, uint64_t noise_seed) {
  const int hop = cfg_.analysis.hop;
  Rng rng = make_rng(noise_seed, kPurposeEval);
  const auto f = upsample_f0(u.f0, hop);
  const auto v = upsample_vuv(u.f0.vuv, hop);
  const SourceNoise d = draw_source_noise(rng, f.size(), cfg_.source.sigma);
  Graph g;
  g.freeze(gen_.params());
  Var y = gen_.synthesize(g, mel_to_tensor(u.mel), f, v, std::span<const SourceNoise>(&d, 1));
  Var real = g.constant(Tensor(Shape{1, 1, static_cast<int64_t>(u.audio.size())}, u.audio));
  return l1_loss(analyzer_->forward(real), analyzer_->forward(y)).value()[0];
}

void Trainer::save(const std::string& path) const {
  BlobFile file;
  file.put_string("format", kCheckpointFormat);
  file.put_string("config", cfg_.dump());
  file.put_i64("step", step_);
  file.put_i64("seed", static_cast<int64_t>(cfg_.seed));
  write_parameters(file, "gen/", gen_.params());
  write_parameters(file, "disc/", disc_.params());
  write_optimizer(file, "opt_g/", opt_g_);
  write_optimizer(file, "opt_d/", opt_d_);
  std::vector<double> cols[6];
  for (const StepRecord& r : history_) {
    cols[0].push_back(r.d_adv);
    cols[1].push_back(r.g_adv);
    cols[2].push_back(r.fm);
    cols[3].push_back(r.mel);
    cols[4].push_back(r.g_total);
    cols[5].push_back(r.skipped ? 1.0 : 0.0);
  }
  const char* names[6] = {"d_adv", "g_adv", "fm", "mel", "g_total", "skipped"};
  for (int i = 0; i < 6; ++i) file.put_f64(std::string("history/") + names[i], cols[i]);
  if (f0_) write_parameters(file, "f0pred/", f0_->params());
  file.save(path);
}

Trainer Trainer::from_checkpoint(const std::string& path) {
  RunConfig cfg;
  BlobFile file = open_checkpoint(path, &cfg);
  Trainer t(cfg);
  read_parameters(file, "gen/", t.gen_.params());
  read_parameters(file, "disc/", t.disc_.params());
  read_optimizer(file, "opt_g/", t.opt_g_);
  read_optimizer(file, "opt_d/", t.opt_d_);
  t.step_ = file.get_i64("step");
  if (file.contains("history/mel")) {
    const char* names[6] = {"d_adv", "g_adv", "fm", "mel", "g_total", "skipped"};
    std::vector<double> cols[6];
    for (int i = 0; i < 6; ++i) cols[i] = file.get_f64(std::string("history/") + names[i]);
    for (size_t k = 0; k < cols[3].size(); ++k) {
      StepRecord r;
      r.step = static_cast<int64_t>(k);
      r.d_adv = cols[0][k];
      r.g_adv = cols[1][k];
      r.fm = cols[2][k];
      r.mel = cols[3][k];
      r.g_total = cols[4][k];
      r.skipped = cols[5][k] != 0.0;
      t.history_.push_back(r);
    }
  }
  if (has_f0_predictor(file)) {
    t.f0_.emplace(cfg.f0_predictor, cfg.seed);
    read_parameters(file, "f0pred/", t.f0_->params());
  }
  return t;
}

}  // namespace sfgan
