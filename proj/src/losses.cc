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

#include "sfgan/losses.h"

#include <stdexcept>

namespace sfgan {

namespace {

Var squared_distance_to(const Var& x, float target) {
  if (target == 0.0f) return ops::mean(ops::square(x));
  Var t = x.graph().constant(Tensor(x.shape(), target));
  return ops::mean(ops::square(ops::sub(x, t)));
}

void require_same_layout(const DiscriminatorOutput& a, const DiscriminatorOutput& b) {
  if (a.scores.size() != b.scores.size() || a.features.size() != b.features.size()) {
    throw std::invalid_argument("loss: discriminator outputs differ in layout");
  }
}

}  // namespace

Var discriminator_adv_loss(const DiscriminatorOutput& real, const DiscriminatorOutput& fake) {
  require_same_layout(real, fake);
  std::vector<Var> terms;
  for (size_t k = 0; k < real.scores.size(); ++k) {
    terms.push_back(squared_distance_to(real.scores[k], 1.0f));
    terms.push_back(squared_distance_to(fake.scores[k], 0.0f));
  }
  return ops::add_n(terms);
}

Var generator_adv_loss(const DiscriminatorOutput& fake) {
  std::vector<Var> terms;
  for (const Var& s : fake.scores) terms.push_back(squared_distance_to(s, 1.0f));
  return ops::add_n(terms);
}

Var feature_matching_loss(const DiscriminatorOutput& real, const DiscriminatorOutput& fake) {
  require_same_layout(real, fake);
  std::vector<Var> terms;
  for (size_t k = 0; k < real.features.size(); ++k) {
    if (real.features[k].size() != fake.features[k].size()) {
      throw std::invalid_argument("loss: feature map counts differ");
    }
    for (size_t i = 0; i < real.features[k].size(); ++i) {
      terms.push_back(l1_loss(real.features[k][i], fake.features[k][i]));
    }
  }
  return ops::add_n(terms);
}

Var l1_loss(const Var& a, const Var& b) { return ops::mean(ops::abs(ops::sub(a, b))); }

}  // namespace sfgan
