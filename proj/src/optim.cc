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

#include "sfgan/optim.h"

#include <cmath>

namespace sfgan {

bool AdamW::step(ParameterStore& params) {
  for (const auto& p : params) {
    if (p->trainable && !p->grad.all_finite()) return false;
  }
  ++steps_;
  const double bc1 = 1.0 - std::pow(static_cast<double>(cfg_.beta1), steps_);
  const double bc2 = 1.0 - std::pow(static_cast<double>(cfg_.beta2), steps_);
  for (auto& p : params) {
    if (!p->trainable) continue;
    auto it = moments_.find(p->name);
    if (it == moments_.end()) {
      it = moments_
               .emplace(p->name, Moments{Tensor(p->value.shape()),
                                         Tensor(p->value.shape())})
               .first;
    }
    auto w = p->value.data();
    auto g = p->grad.data();
    auto m = it->second.m.data();
    auto v = it->second.v.data();
    for (size_t i = 0; i < w.size(); ++i) {
      w[i] -= cfg_.lr * cfg_.weight_decay * w[i];
      m[i] = cfg_.beta1 * m[i] + (1.0f - cfg_.beta1) * g[i];
      v[i] = cfg_.beta2 * v[i] + (1.0f - cfg_.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      w[i] -= static_cast<float>(cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps));
    }
  }
  return true;
}

}  // namespace sfgan
