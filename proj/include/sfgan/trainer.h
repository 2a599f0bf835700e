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

// Adversarial training loop. Each step draws its crops and noise from
// make_rng(seed, step), so a run resumed from a checkpoint continues exactly
// as an uninterrupted one.

#ifndef SFGAN_TRAINER_H_
#define SFGAN_TRAINER_H_

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sfgan/checkpoint.h"
#include "sfgan/config.h"
#include "sfgan/discriminator.h"
#include "sfgan/f0_predictor.h"
#include "sfgan/generator.h"

namespace sfgan {

// One training clip with its analysis features.
struct Utterance {
  std::string name;
  std::vector<float> audio;  // zero-padded to mel.rows * hop
  MelSpectrogram mel;
  F0Track f0;
};

// Pads `samples` to at least `min_frames` frames and extracts features.
Utterance make_utterance(std::string name, std::span<const float> samples,
                         const AnalysisConfig& analysis, int64_t min_frames = 1);

struct StepRecord {
  int64_t step = 0;
  double d_adv = 0.0;
  double g_adv = 0.0;
  double fm = 0.0;
  double mel = 0.0;
  double g_total = 0.0;
  bool skipped = false;  // a loss or gradient was non-finite; no update made

  bool finite() const;
};

class Trainer {
 public:
  explicit Trainer(const RunConfig& cfg);
  static Trainer from_checkpoint(const std::string& path);

  Trainer(Trainer&&) noexcept = default;
  Trainer& operator=(Trainer&&) noexcept = default;

  const RunConfig& config() const { return cfg_; }
  Generator& generator() { return gen_; }
  Discriminator& discriminator() { return disc_; }
  const AdamW& generator_optimizer() const { return opt_g_; }
  const AdamW& discriminator_optimizer() const { return opt_d_; }
  int64_t step_count() const { return step_; }
  const std::vector<StepRecord>& history() const { return history_; }

  // One discriminator update followed by one generator update.
  StepRecord step(const std::vector<Utterance>& data);
  void run(const std::vector<Utterance>& data, int64_t steps,
           const std::function<void(const StepRecord&)>& on_step = {});

  // Mel L1 of the whole utterance resynthesized with noise from `noise_seed`.
  double mel_loss(const Utterance& u, uint64_t noise_seed);

  // Learning rate in effect for `step` given `dataset_size` clips.
  double learning_rate(int64_t step, size_t dataset_size) const;

  std::optional<F0Predictor>& f0_predictor() { return f0_; }
  void save(const std::string& path) const;

 private:
  RunConfig cfg_;
  Generator gen_;
  Discriminator disc_;
  AdamW opt_g_;
  AdamW opt_d_;
  int64_t step_ = 0;
  std::vector<StepRecord> history_;
  std::unique_ptr<MelAnalyzer> analyzer_;
  std::optional<F0Predictor> f0_;
};

}  // namespace sfgan

#endif  // SFGAN_TRAINER_H_
