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

#ifndef SFGAN_OPTIM_H_
#define SFGAN_OPTIM_H_

#include <cstdint>
#include <map>
#include <string>

#include "sfgan/autograd.h"
#include "sfgan/tensor.h"

namespace sfgan {

struct AdamWConfig {
  float lr = 2e-4f;
  float beta1 = 0.8f;
  float beta2 = 0.99f;
  float eps = 1e-8f;
  float weight_decay = 0.01f;
};

// AdamW with decoupled weight decay. Moment state is keyed by parameter
// name so it survives checkpoint round-trips.
class AdamW {
 public:
  struct Moments {
    Tensor m;
    Tensor v;
  };

  explicit AdamW(AdamWConfig cfg = {}) : cfg_(cfg) {}

  // Applies one update to every trainable parameter in `params`. Returns
  // false and leaves parameters and state untouched if any gradient is
  // non-finite.
  bool step(ParameterStore& params);

  void set_lr(float lr) { cfg_.lr = lr; }
  const AdamWConfig& config() const { return cfg_; }
  int64_t step_count() const { return steps_; }

  const std::map<std::string, Moments>& moments() const { return moments_; }
  void restore(int64_t steps, std::map<std::string, Moments> moments) {
    steps_ = steps;
    moments_ = std::move(moments);
  }

 private:
  AdamWConfig cfg_;
  int64_t steps_ = 0;
  std::map<std::string, Moments> moments_;
};

}  // namespace sfgan

#endif  // SFGAN_OPTIM_H_
