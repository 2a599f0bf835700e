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

// Least-squares adversarial, feature-matching and mel losses. Every term is
// a mean over its map, summed over maps and sub-discriminators.

#ifndef SFGAN_LOSSES_H_
#define SFGAN_LOSSES_H_

#include "sfgan/discriminator.h"

namespace sfgan {

// sum_k mean((D_k(real) - 1)^2) + mean(D_k(fake)^2)
Var discriminator_adv_loss(const DiscriminatorOutput& real, const DiscriminatorOutput& fake);
// sum_k mean((D_k(fake) - 1)^2)
Var generator_adv_loss(const DiscriminatorOutput& fake);
// sum over every feature map of mean |real - fake|
Var feature_matching_loss(const DiscriminatorOutput& real, const DiscriminatorOutput& fake);
// mean |a - b|
Var l1_loss(const Var& a, const Var& b);

struct LossWeights {
  float fm = 2.0f;
  float mel = 45.0f;
};

}  // namespace sfgan

#endif  // SFGAN_LOSSES_H_
