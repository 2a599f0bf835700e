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

// Frame-level F0 and voicing predicted from the lowest mel bands, for when
// only a mel-spectrogram is available.

#ifndef SFGAN_F0_PREDICTOR_H_
#define SFGAN_F0_PREDICTOR_H_

#include <functional>
#include <vector>

#include "sfgan/features.h"
#include "sfgan/nn.h"
#include "sfgan/optim.h"

namespace sfgan {

struct F0PredictorConfig {
  int input_dims = 10;
  int channels = 10;
  std::vector<int> kernels{3, 5, 7};
  int stack_depth = 2;  // conv + ReLU layers per stack
};

struct F0TrainConfig {
  int steps = 2000;
  AdamWConfig optimizer{1e-3f, 0.9f, 0.999f, 1e-8f, 0.0f};
  // Squared Hz errors are scaled to the size of the voicing term.
  float f0_loss_scale = 1e-4f;
  int max_frames = 256;  // random crop per step
  int eval_interval = 50;
};

struct F0Example {
  MelSpectrogram mel;
  F0Track f0;
};

class F0Predictor {
 public:
  F0Predictor(const F0PredictorConfig& cfg, uint64_t seed);

  const F0PredictorConfig& config() const { return cfg_; }
  ParameterStore& params() { return store_; }
  const ParameterStore& params() const { return store_; }

  struct Output {
    Var f0;     // (B, 1, L), Hz, >= 0
    Var logit;  // (B, 1, L), voicing logit
  };
  // mel (B, n_mels, L) with n_mels >= input_dims.
  Output forward(Graph& g, const Var& mel);

  // f0 where the voicing probability exceeds 0.5, otherwise 0.
  F0Track predict(const MelSpectrogram& mel);

  // Starting point for the F0 head so that ReLU starts in its linear range.
  void set_f0_bias(float hz);

 private:
  F0PredictorConfig cfg_;
  ParameterStore store_;
  std::vector<std::vector<Conv1dLayer>> stacks_;
  Conv1dLayer f0_head_;
  Conv1dLayer vuv_head_;
};

// Masked MSE on voiced frames (scaled) plus voicing cross-entropy.
Var f0_predictor_loss(const F0Predictor::Output& out, const F0Track& target, float f0_scale);

struct F0TrainReport {
  std::vector<double> train_loss;  // per step
  std::vector<double> eval_loss;   // per evaluation
  int64_t best_step = -1;
  double best_eval_loss = 0.0;
};

// Trains in place and leaves the best-evaluation weights in `model`. The
// evaluation set defaults to the training set when `eval` is empty.
F0TrainReport train_f0_predictor(F0Predictor& model, const std::vector<F0Example>& train,
                                 const std::vector<F0Example>& eval,
                                 const F0TrainConfig& cfg, uint64_t seed,
                                 const std::function<void(int64_t, double)>& log = {});

double vuv_accuracy(const F0Track& predicted, const F0Track& target);

}  // namespace sfgan

#endif  // SFGAN_F0_PREDICTOR_H_
