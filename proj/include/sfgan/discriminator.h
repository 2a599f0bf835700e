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

// Multi-period and multi-scale waveform discriminators.

#ifndef SFGAN_DISCRIMINATOR_H_
#define SFGAN_DISCRIMINATOR_H_

#include <vector>

#include "sfgan/nn.h"

namespace sfgan {

struct DiscriminatorConfig {
  std::vector<int> periods{2, 3, 5, 7, 11};
  int scales = 3;
  // Hidden widths of a period branch; each layer strides by 3 over time.
  std::vector<int> mpd_channels{32, 128, 512, 1024, 1024};
  // Hidden widths, kernels, strides and groups of a scale branch.
  std::vector<int> msd_channels{128, 128, 256, 512, 1024, 1024, 1024};
  std::vector<int> msd_kernels{15, 41, 41, 41, 41, 41, 5};
  std::vector<int> msd_strides{1, 2, 2, 4, 4, 1, 1};
  std::vector<int> msd_groups{1, 4, 16, 16, 16, 16, 1};
  float lrelu_slope = 0.1f;

  static DiscriminatorConfig full();
  static DiscriminatorConfig toy();
  void validate() const;
};

// One score map and the intermediate activations of each sub-discriminator,
// periods first, then scales.
struct DiscriminatorOutput {
  std::vector<Var> scores;
  std::vector<std::vector<Var>> features;
};

class Discriminator {
 public:
  Discriminator(const DiscriminatorConfig& cfg, uint64_t seed);

  const DiscriminatorConfig& config() const { return cfg_; }
  ParameterStore& params() { return store_; }
  const ParameterStore& params() const { return store_; }
  size_t count() const { return period_.size() + scale_.size(); }

  // audio (B, 1, T) -> per-branch scores and feature maps.
  DiscriminatorOutput forward(Graph& g, const Var& audio);

 private:
  struct Branch {
    std::vector<Conv1dLayer> layers;
    Conv1dLayer post;
  };
  Branch make_period_branch(const std::string& name, Rng& rng);
  Branch make_scale_branch(const std::string& name, Rng& rng);
  void run(Graph& g, const Branch& b, Var x, DiscriminatorOutput& out);

  DiscriminatorConfig cfg_;
  ParameterStore store_;
  std::vector<Branch> period_;
  std::vector<Branch> scale_;
};

}  // namespace sfgan

#endif  // SFGAN_DISCRIMINATOR_H_
