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

#include "sfgan/f0_predictor.h"

#include <cmath>
#include <stdexcept>

namespace sfgan {

namespace {

constexpr uint64_t kPurposeF0Train = 0x663074;

F0Track crop_track(const F0Track& t, int64_t start, int64_t len) {
  F0Track out;
  out.f0.assign(t.f0.begin() + start, t.f0.begin() + start + len);
  out.vuv.assign(t.vuv.begin() + start, t.vuv.begin() + start + len);
  return out;
}

MelSpectrogram crop_mel(const MelSpectrogram& m, int64_t start, int64_t len) {
  MelSpectrogram out(len, m.cols);
  std::copy(m.values.begin() + start * m.cols, m.values.begin() + (start + len) * m.cols,
            out.values.begin());
  return out;
}

void check_example(const F0Example& ex, int dims) {
  if (ex.mel.rows < 1 || ex.mel.cols < dims ||
      static_cast<int64_t>(ex.f0.size()) != ex.mel.rows || ex.f0.vuv.size() != ex.f0.f0.size()) {
    throw std::invalid_argument("F0 predictor: example mel/F0 frame counts disagree");
  }
}

}  // namespace

F0Predictor::F0Predictor(const F0PredictorConfig& cfg, uint64_t seed) : cfg_(cfg) {
  if (cfg.input_dims < 1 || cfg.channels < 1 || cfg.kernels.empty() || cfg.stack_depth < 1) {
    throw std::invalid_argument("F0 predictor config: sizes must be positive");
  }
  Rng rng = make_rng(seed, 0x663070);
  for (size_t s = 0; s < cfg.kernels.size(); ++s) {
    const int k = cfg.kernels[s];
    if (k % 2 == 0) throw std::invalid_argument("F0 predictor config: kernels must be odd");
    std::vector<Conv1dLayer> stack;
    for (int d = 0; d < cfg.stack_depth; ++d) {
      stack.emplace_back(store_, "f0.stack" + std::to_string(s) + ".conv" + std::to_string(d),
                         d == 0 ? cfg.input_dims : cfg.channels, cfg.channels, k,
                         Conv1dLayer::same(k), rng);
    }
    stacks_.push_back(std::move(stack));
  }
  const int width = cfg.channels * static_cast<int>(cfg.kernels.size());
  f0_head_ = Conv1dLayer(store_, "f0.head_f0", width, 1, 1, {}, rng);
  vuv_head_ = Conv1dLayer(store_, "f0.head_vuv", width, 1, 1, {}, rng);
}

void F0Predictor::set_f0_bias(float hz) { store_[*f0_head_.bias_index()].value.fill(hz); }

F0Predictor::Output F0Predictor::forward(Graph& g, const Var& mel) {
  if (mel.value().shape().rank() != 3 || mel.value().channels() < cfg_.input_dims) {
    throw std::invalid_argument("F0 predictor: mel has too few bands");
  }
  Var low = ops::slice_channels(mel, 0, cfg_.input_dims);
  std::vector<Var> branches;
  for (const auto& stack : stacks_) {
    Var x = low;
    for (const Conv1dLayer& layer : stack) x = ops::relu(layer.forward(g, store_, x));
    branches.push_back(x);
  }
  Var h = ops::concat_channels(branches);
  return {ops::relu(f0_head_.forward(g, store_, h)), vuv_head_.forward(g, store_, h)};
}

F0Track F0Predictor::predict(const MelSpectrogram& mel) {
  Graph g;
  g.freeze(store_);
  Output out = forward(g, g.constant(mel_to_tensor(mel)));
  F0Track track;
  track.f0.assign(mel.rows, 0.0f);
  track.vuv.assign(mel.rows, 0);
  for (int64_t l = 0; l < mel.rows; ++l) {
    // sigmoid(z) > 0.5 exactly when z > 0; a tie stays unvoiced.
    const float f = out.f0.value()[l];
    if (out.logit.value()[l] > 0.0f && f > 0.0f) {
      track.f0[l] = f;
      track.vuv[l] = 1;
    }
  }
  return track;
}

Var f0_predictor_loss(const F0Predictor::Output& out, const F0Track& target, float f0_scale) {
  const Tensor& f = out.f0.value();
  const int64_t n = f.numel();
  if (static_cast<int64_t>(target.size()) != n) {
    throw std::invalid_argument("F0 predictor loss: target length mismatch");
  }
  Graph& g = out.f0.graph();
  Tensor mask(f.shape()), hz(f.shape()), labels(f.shape());
  int64_t voiced = 0;
  for (int64_t i = 0; i < n; ++i) {
    mask[i] = target.vuv[i] ? 1.0f : 0.0f;
    hz[i] = target.vuv[i] ? target.f0[i] : 0.0f;
    labels[i] = mask[i];
    voiced += target.vuv[i] ? 1 : 0;
  }
  Var bce = ops::bce_with_logits(out.logit, labels);
  if (voiced == 0) return bce;
  Var err = ops::mul(ops::square(ops::sub(out.f0, g.constant(hz))), g.constant(mask));
  Var mse = ops::scale(ops::sum(err), f0_scale / static_cast<float>(voiced));
  return ops::add_n({mse, bce});
}

double vuv_accuracy(const F0Track& predicted, const F0Track& target) {
  if (predicted.size() != target.size() || target.size() == 0) {
    throw std::invalid_argument("vuv_accuracy: length mismatch");
  }
  size_t same = 0;
  for (size_t i = 0; i < target.size(); ++i) same += predicted.vuv[i] == target.vuv[i];
  return static_cast<double>(same) / target.size();
}

F0TrainReport train_f0_predictor(F0Predictor& model, const std::vector<F0Example>& train,
                                 const std::vector<F0Example>& eval,
                                 const F0TrainConfig& cfg, uint64_t seed,
                                 const std::function<void(int64_t, double)>& log) {
  if (train.empty()) throw std::invalid_argument("train_f0_predictor: empty dataset");
  const int dims = model.config().input_dims;
  for (const auto& ex : train) check_example(ex, dims);
  for (const auto& ex : eval) check_example(ex, dims);
  const auto& eval_set = eval.empty() ? train : eval;

  double sum = 0.0;
  int64_t count = 0;
  for (const auto& ex : train) {
    for (size_t l = 0; l < ex.f0.size(); ++l) {
      if (ex.f0.vuv[l]) {
        sum += ex.f0.f0[l];
        ++count;
      }
    }
  }
  if (count > 0) model.set_f0_bias(static_cast<float>(sum / count));

  auto evaluate = [&]() {
    double total = 0.0;
    for (const auto& ex : eval_set) {
      Graph g;
      g.freeze(model.params());
      auto out = model.forward(g, g.constant(mel_to_tensor(ex.mel)));
      total += f0_predictor_loss(out, ex.f0, cfg.f0_loss_scale).value()[0];
    }
    return total / eval_set.size();
  };

  F0TrainReport report;
  AdamW opt(cfg.optimizer);
  ParameterStore best = model.params();
  report.best_eval_loss = evaluate();
  report.best_step = 0;
  report.eval_loss.push_back(report.best_eval_loss);
  for (int64_t step = 0; step < cfg.steps; ++step) {
    Rng rng = make_rng(seed, kPurposeF0Train, static_cast<uint64_t>(step));
    const auto& ex = train[std::uniform_int_distribution<size_t>(0, train.size() - 1)(rng)];
    const int64_t len = std::min<int64_t>(ex.mel.rows, cfg.max_frames);
    const int64_t start = std::uniform_int_distribution<int64_t>(0, ex.mel.rows - len)(rng);
    Graph g;
    auto out = model.forward(g, g.constant(mel_to_tensor(crop_mel(ex.mel, start, len))));
    Var loss = f0_predictor_loss(out, crop_track(ex.f0, start, len), cfg.f0_loss_scale);
    model.params().zero_grad();
    g.backward(loss);
    opt.step(model.params());
    report.train_loss.push_back(loss.value()[0]);
    if (log) log(step, loss.value()[0]);

    if ((step + 1) % cfg.eval_interval == 0 || step + 1 == cfg.steps) {
      const double e = evaluate();
      report.eval_loss.push_back(e);
      if (e < report.best_eval_loss) {
        report.best_eval_loss = e;
        report.best_step = step + 1;
        best = model.params();
      }
    }
  }
  model.params() = best;
  return report;
}

}  // namespace sfgan
