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

// Seeded randomness and parameterized layers shared by every network.

#ifndef SFGAN_NN_H_
#define SFGAN_NN_H_

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sfgan/autograd.h"
#include "sfgan/ops.h"

namespace sfgan {

using Rng = std::mt19937_64;

// Independent stream for (seed, purpose, index).
Rng make_rng(uint64_t seed, uint64_t purpose = 0, uint64_t index = 0);
std::vector<float> normal_samples(Rng& rng, size_t n, double stddev);
// Uniform on [-bound, bound].
Tensor uniform_tensor(Shape shape, double bound, Rng& rng);

// Layers refer to their parameters by index so that a network can be copied
// together with its ParameterStore.
class Conv1dLayer {
 public:
  Conv1dLayer() = default;
  // Weights uniform in +-sqrt(1 / (in_ch / groups * k)).
  Conv1dLayer(ParameterStore& store, const std::string& name, int in_ch,
              int out_ch, int kernel, ops::ConvSpec spec, Rng& rng,
              bool bias = true);

  // Length-preserving ("same") convolution for odd kernels.
  static ops::ConvSpec same(int kernel, int dilation = 1) {
    return {1, dilation, dilation * (kernel - 1) / 2, 1};
  }

  Var forward(Graph& g, ParameterStore& store, const Var& x) const;
  size_t weight_index() const { return weight_; }
  std::optional<size_t> bias_index() const { return bias_; }
  const ops::ConvSpec& spec() const { return spec_; }

 private:
  size_t weight_ = 0;
  std::optional<size_t> bias_;
  ops::ConvSpec spec_;
};

class ConvTranspose1dLayer {
 public:
  ConvTranspose1dLayer() = default;
  ConvTranspose1dLayer(ParameterStore& store, const std::string& name,
                       int in_ch, int out_ch, int kernel, int stride,
                       int padding, Rng& rng);

  Var forward(Graph& g, ParameterStore& store, const Var& x) const;
  size_t weight_index() const { return weight_; }

 private:
  size_t weight_ = 0;
  size_t bias_ = 0;
  int stride_ = 1;
  int padding_ = 0;
};

}  // namespace sfgan

#endif  // SFGAN_NN_H_
