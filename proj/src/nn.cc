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

#include "sfgan/nn.h"

#include <cmath>

namespace sfgan {

Rng make_rng(uint64_t seed, uint64_t purpose, uint64_t index) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(purpose), static_cast<uint32_t>(index),
                    static_cast<uint32_t>(index >> 32)};
  return Rng(seq);
}

std::vector<float> normal_samples(Rng& rng, size_t n, double stddev) {
  std::normal_distribution<double> dist(0.0, stddev);
  std::vector<float> out(n);
  for (float& v : out) v = static_cast<float>(dist(rng));
  return out;
}

Tensor uniform_tensor(Shape shape, double bound, Rng& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  Tensor t(std::move(shape));
  for (float& v : t.data()) v = static_cast<float>(dist(rng));
  return t;
}

Conv1dLayer::Conv1dLayer(ParameterStore& store, const std::string& name,
                         int in_ch, int out_ch, int kernel, ops::ConvSpec spec,
                         Rng& rng, bool bias)
    : spec_(spec) {
  const int fan_in = in_ch / spec.groups * kernel;
  const double bound = std::sqrt(1.0 / fan_in);
  weight_ = store.size();
  store.add(name + ".weight",
            uniform_tensor(Shape{out_ch, in_ch / spec.groups, kernel}, bound, rng));
  if (bias) {
    bias_ = store.size();
    store.add(name + ".bias", uniform_tensor(Shape{out_ch}, bound, rng));
  }
}

Var Conv1dLayer::forward(Graph& g, ParameterStore& store, const Var& x) const {
  Var w = g.param(store[weight_]);
  Var b = bias_ ? g.param(store[*bias_]) : Var();
  return ops::conv1d(x, w, b, spec_);
}

ConvTranspose1dLayer::ConvTranspose1dLayer(ParameterStore& store,
                                           const std::string& name, int in_ch,
                                           int out_ch, int kernel, int stride,
                                           int padding, Rng& rng)
    : stride_(stride), padding_(padding) {
  const double bound = std::sqrt(1.0 / (in_ch * kernel));
  weight_ = store.size();
  store.add(name + ".weight", uniform_tensor(Shape{in_ch, out_ch, kernel}, bound, rng));
  bias_ = store.size();
  store.add(name + ".bias", uniform_tensor(Shape{out_ch}, bound, rng));
}

Var ConvTranspose1dLayer::forward(Graph& g, ParameterStore& store,
                                  const Var& x) const {
  return ops::conv_transpose1d(x, g.param(store[weight_]), g.param(store[bias_]),
                               stride_, padding_);
}

}  // namespace sfgan
