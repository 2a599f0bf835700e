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

#include "sfgan/discriminator.h"

#include <numeric>
#include <stdexcept>

namespace sfgan {

DiscriminatorConfig DiscriminatorConfig::full() { return DiscriminatorConfig{}; }

DiscriminatorConfig DiscriminatorConfig::toy() {
  DiscriminatorConfig c;
  c.mpd_channels = {4, 8, 16, 32, 32};
  c.msd_channels = {8, 8, 16, 32, 32, 32, 32};
  return c;
}

void DiscriminatorConfig::validate() const {
  auto fail = [](const std::string& m) {
    throw std::invalid_argument("discriminator config: " + m);
  };
  if (periods.empty() && scales < 1) fail("no sub-discriminators");
  for (int p : periods) {
    if (p < 1) fail("periods must be >= 1");
  }
  if (mpd_channels.empty()) fail("mpd_channels is empty");
  const size_t n = msd_channels.size();
  if (n == 0 || msd_kernels.size() != n || msd_strides.size() != n || msd_groups.size() != n) {
    fail("msd_channels, msd_kernels, msd_strides and msd_groups must match in length");
  }
  for (size_t i = 0; i < n; ++i) {
    if (msd_kernels[i] % 2 == 0 || msd_strides[i] < 1 || msd_groups[i] < 1) {
      fail("scale branch kernels must be odd and strides/groups positive");
    }
  }
  for (int c : mpd_channels) {
    if (c < 1) fail("channel widths must be positive");
  }
  for (int c : msd_channels) {
    if (c < 1) fail("channel widths must be positive");
  }
}

Discriminator::Discriminator(const DiscriminatorConfig& cfg, uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  Rng rng = make_rng(seed, 0x646973);
  for (int p : cfg_.periods) period_.push_back(make_period_branch("mpd.p" + std::to_string(p), rng));
  for (int s = 0; s < cfg_.scales; ++s) scale_.push_back(make_scale_branch("msd.s" + std::to_string(s), rng));
}

Discriminator::Branch Discriminator::make_period_branch(const std::string& name, Rng& rng) {
  Branch b;
  int in = 1;
  const size_t n = cfg_.mpd_channels.size();
  for (size_t i = 0; i < n; ++i) {
    const int out = cfg_.mpd_channels[i];
    // The last hidden layer keeps full resolution.
    const int stride = i + 1 < n ? 3 : 1;
    b.layers.emplace_back(store_, name + ".conv" + std::to_string(i), in, out, 5,
                          ops::ConvSpec{stride, 1, 2, 1}, rng);
    in = out;
  }
  b.post = Conv1dLayer(store_, name + ".post", in, 1, 3, Conv1dLayer::same(3), rng);
  return b;
}

Discriminator::Branch Discriminator::make_scale_branch(const std::string& name, Rng& rng) {
  Branch b;
  int in = 1;
  for (size_t i = 0; i < cfg_.msd_channels.size(); ++i) {
    const int out = cfg_.msd_channels[i];
    // Narrow presets cannot always honour the nominal group count.
    const int groups = std::gcd(cfg_.msd_groups[i], std::gcd(in, out));
    const int k = cfg_.msd_kernels[i];
    b.layers.emplace_back(store_, name + ".conv" + std::to_string(i), in, out, k,
                          ops::ConvSpec{cfg_.msd_strides[i], 1, (k - 1) / 2, groups}, rng);
    in = out;
  }
  b.post = Conv1dLayer(store_, name + ".post", in, 1, 3, Conv1dLayer::same(3), rng);
  return b;
}

void Discriminator::run(Graph& g, const Branch& b, Var x, DiscriminatorOutput& out) {
  std::vector<Var> feats;
  for (const Conv1dLayer& layer : b.layers) {
    x = ops::leaky_relu(layer.forward(g, store_, x), cfg_.lrelu_slope);
    feats.push_back(x);
  }
  x = b.post.forward(g, store_, x);
  feats.push_back(x);
  out.scores.push_back(x);
  out.features.push_back(std::move(feats));
}

DiscriminatorOutput Discriminator::forward(Graph& g, const Var& audio) {
  const Tensor& a = audio.value();
  if (a.shape().rank() != 3 || a.channels() != 1 || a.length() < 1) {
    throw std::invalid_argument("discriminator: expected non-empty (batch, 1, time) audio");
  }
  DiscriminatorOutput out;
  for (size_t i = 0; i < period_.size(); ++i) {
    const int p = cfg_.periods[i];
    const int64_t rem = a.length() % p;
    Var x = rem ? ops::pad_time(audio, 0, p - rem) : audio;
    run(g, period_[i], ops::fold_period(x, p), out);
  }
  Var x = audio;
  for (size_t s = 0; s < scale_.size(); ++s) {
    if (s > 0) x = ops::avg_pool1d(x, 4, 2, 1);
    run(g, scale_[s], x, out);
  }
  return out;
}

}  // namespace sfgan
