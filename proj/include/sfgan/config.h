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

// Complete run configuration, serialized as JSON. A document names a preset
// and overrides any subset of its fields; unknown keys are errors.

#ifndef SFGAN_CONFIG_H_
#define SFGAN_CONFIG_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "sfgan/discriminator.h"
#include "sfgan/f0_predictor.h"
#include "sfgan/features.h"
#include "sfgan/generator.h"
#include "sfgan/losses.h"
#include "sfgan/optim.h"
#include "sfgan/source.h"

namespace sfgan {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainingConfig {
  int batch_size = 16;
  int segment_frames = 32;  // 8192 samples at hop 256
  AdamWConfig optimizer;
  double lr_decay = 0.999;  // per epoch
  LossWeights weights;
  int64_t steps = 2500000;
  int64_t checkpoint_interval = 5000;
  int64_t log_interval = 100;
};

struct RunConfig {
  std::string preset = "v1";
  uint64_t seed = 1234;
  AnalysisConfig analysis;
  SourceConfig source;
  GeneratorConfig generator;
  DiscriminatorConfig discriminator;
  TrainingConfig training;
  F0PredictorConfig f0_predictor;
  F0TrainConfig f0_training;

  // "v1", "v2" or "toy".
  static RunConfig from_preset(std::string_view name);
  static RunConfig parse(const std::string& json_text);
  static RunConfig load(const std::string& path);

  // Canonical JSON listing every field; parse(dump()) reproduces *this.
  std::string dump() const;
  void validate() const;  // throws ConfigError

  // Source settings with the rate and hop taken from the analysis section.
  SourceConfig effective_source() const {
    SourceConfig s = source;
    s.sample_rate = analysis.sample_rate;
    s.hop = analysis.hop;
    return s;
  }

  bool no_dnn() const { return !source.dnn_enabled; }
  bool no_subblock() const { return !generator.subblock_enabled; }
  bool no_pc_resblock() const { return !generator.pc_resblock_enabled; }
};

}  // namespace sfgan

#endif  // SFGAN_CONFIG_H_
