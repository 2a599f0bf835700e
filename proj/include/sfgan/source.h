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

// Sample-level excitation from frame-level F0: a sinusoid where voiced,
// network-shaped Gaussian noise where unvoiced.

#ifndef SFGAN_SOURCE_H_
#define SFGAN_SOURCE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "sfgan/features.h"
#include "sfgan/nn.h"

namespace sfgan {

struct SourceConfig {
  double alpha = 0.1;
  double sigma = 0.003;
  int sample_rate = kDefaultSampleRate;
  int hop = 256;
  // Off reproduces the "no noise network" ablation: g is the identity.
  bool dnn_enabled = true;
  int dnn_channels = 16;
  int dnn_kernel = 9;
};

struct ExcitationSignal {
  std::vector<float> e;
  std::vector<uint8_t> vuv;

  size_t size() const { return e.size(); }
};

// Per-sample F0: linear between centres of adjacent voiced frames (frame l
// is centred on sample l*hop + hop/2), held flat where the neighbour is
// unvoiced or past the ends, and 0 inside unvoiced frames.
std::vector<float> upsample_f0(const F0Track& track, int hop);
std::vector<uint8_t> upsample_vuv(std::span<const uint8_t> vuv, int hop);

// Sine branch only: alpha * sin(sum_{k<=t} 2 pi f_k / sr + phi) with t
// counted from 1. The phase keeps accumulating (and holds) through f = 0.
std::vector<float> sine_excitation(std::span<const float> f0, double alpha,
                                   int sample_rate, double phi);

// Random draws that make one excitation reproducible.
struct SourceNoise {
  std::vector<float> noise;  // n_t ~ N(0, sigma^2), shared by both branches
  double phi = 0.0;          // in (-pi, pi]
};

SourceNoise draw_source_noise(Rng& rng, size_t samples, double sigma);

// The noise-shaping network g: conv(1 -> C, k) -> tanh -> conv(C -> 1, k),
// length preserving.
class NoiseShaper {
 public:
  NoiseShaper() = default;
  NoiseShaper(ParameterStore& store, const std::string& name, const SourceConfig& cfg,
              Rng& rng);

  Var forward(Graph& g, ParameterStore& store, const Var& x) const;
  const Conv1dLayer& output_layer() const { return out_; }

 private:
  Conv1dLayer in_;
  Conv1dLayer out_;
};

class SourceModule {
 public:
  SourceModule() = default;
  SourceModule(ParameterStore& store, const SourceConfig& cfg, Rng& rng);

  const SourceConfig& config() const { return cfg_; }
  const NoiseShaper& shaper() const { return shaper_; }

  // Batched excitation, (B, 1, T). `f0` and `vuv` are per-sample and
  // batch-major; noise.size() must equal f0.size() and there is one phase
  // per batch item. Differentiable with respect to g only.
  Var forward(Graph& g, ParameterStore& store, std::span<const float> f0,
              std::span<const uint8_t> vuv, int64_t batch,
              std::span<const SourceNoise> draws) const;

  // Single utterance from a frame-level track.
  ExcitationSignal generate(ParameterStore& store, const F0Track& track,
                            Rng& rng) const;

 private:
  SourceConfig cfg_;
  NoiseShaper shaper_;
};

}  // namespace sfgan

#endif  // SFGAN_SOURCE_H_
