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

// Waveform generator: mel frames are upsampled by four UpBlocks while
// SubBlocks bring the excitation down to each UpBlock's rate, and the two
// are fused in PC-ResBlocks.

#ifndef SFGAN_GENERATOR_H_
#define SFGAN_GENERATOR_H_

#include <string>
#include <vector>

#include "sfgan/nn.h"
#include "sfgan/source.h"

namespace sfgan {

struct GeneratorConfig {
  int n_mels = 80;
  int h_u = 512;
  std::vector<int> k_u{16, 16, 4, 4};
  std::vector<int> u_r{8, 8, 2, 2};
  std::vector<int> k_r{3, 7, 11};
  std::vector<std::vector<int>> d_r{{1, 3, 5}, {1, 3, 5}, {1, 3, 5}};
  std::vector<int> k_m{1, 2, 2, 8};
  std::vector<int> k_s{15, 11, 7, 3};
  std::vector<int> d_s{7, 5, 3, 1};
  int pre_kernel = 7;
  int post_kernel = 7;
  float lrelu_slope = 0.1f;
  bool subblock_enabled = true;
  bool pc_resblock_enabled = true;

  static GeneratorConfig v1();
  static GeneratorConfig v2();
  static GeneratorConfig toy();

  int hop() const;
  // Channel width after UpBlock j (0-based): h_u / 2^(j+1).
  int width(int j) const { return h_u >> (j + 1); }
  void validate() const;  // throws std::invalid_argument
};

// ĉ <- f_{k,1}(ê, f_{k,d}(ê, ĉ)) + ĉ for each dilation d, with
// f(x, y) = lrelu(conv(x) + conv'(y)). When `fused` is false the ê side is
// absent and the block is a plain residual block.
class PCResBlock {
 public:
  PCResBlock() = default;
  PCResBlock(ParameterStore& store, const std::string& name, int channels,
             int excitation_channels, int kernel, const std::vector<int>& dilations,
             float slope, bool fused, Rng& rng);

  Var forward(Graph& g, ParameterStore& store, const Var& c, const Var& e) const;

 private:
  struct Stage {
    Conv1dLayer ex_d, feat_d;  // f_{k,d}
    Conv1dLayer ex_1, feat_1;  // f_{k,1}
  };
  std::vector<Stage> stages_;
  float slope_ = 0.1f;
  bool fused_ = true;
};

// Lengths seen by one forward pass, for checking the resolution ladder.
struct GeneratorTrace {
  std::vector<int64_t> up_lengths;   // after each UpBlock
  std::vector<int64_t> sub_lengths;  // after each SubBlock stage
};

class Generator {
 public:
  Generator(const GeneratorConfig& cfg, const SourceConfig& source, uint64_t seed);

  const GeneratorConfig& config() const { return cfg_; }
  const SourceModule& source() const { return source_; }
  ParameterStore& params() { return store_; }
  const ParameterStore& params() const { return store_; }

  // mel (B, n_mels, L), excitation (B, 1, hop * L) -> waveform (B, 1, hop * L).
  Var forward(Graph& g, const Var& mel, const Var& excitation,
              GeneratorTrace* trace = nullptr);

  // Excitation followed by forward(). `draws` holds one entry per batch item.
  Var synthesize(Graph& g, const Tensor& mel, std::span<const float> f0,
                 std::span<const uint8_t> vuv, std::span<const SourceNoise> draws);

  // Inference on one utterance; F0 is drawn from the track and the random
  // excitation terms from `rng`.
  std::vector<float> generate(const MelSpectrogram& mel, const F0Track& f0, Rng& rng);

 private:
  struct UpBlock {
    ConvTranspose1dLayer up;
    std::vector<PCResBlock> mrf;
  };
  struct SubBlock {
    int pool = 1;
    Conv1dLayer conv;
  };

  GeneratorConfig cfg_;
  ParameterStore store_;
  SourceModule source_;
  Conv1dLayer pre_;
  std::vector<UpBlock> ups_;
  std::vector<SubBlock> subs_;
  Conv1dLayer post_;
};

}  // namespace sfgan

#endif  // SFGAN_GENERATOR_H_
