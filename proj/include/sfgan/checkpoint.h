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

// Checkpoint sections inside a BlobFile:
//
//   format             string "sfgan-checkpoint"
//   config             string, RunConfig JSON
//   step, seed         i64
//   gen/<param>        f32 generator weights (includes the source network)
//   disc/<param>       f32 discriminator weights
//   opt_g/steps        i64, opt_g/m/<param>, opt_g/v/<param> f32 moments
//   opt_d/...          same for the discriminator optimizer
//   history/<term>     f64 per-step loss history
//   f0pred/<param>     optional F0 predictor weights

#ifndef SFGAN_CHECKPOINT_H_
#define SFGAN_CHECKPOINT_H_

#include <stdexcept>
#include <string>
#include <string_view>

#include "sfgan/config.h"
#include "sfgan/container.h"
#include "sfgan/optim.h"

namespace sfgan {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kCheckpointFormat = "sfgan-checkpoint";

void write_parameters(BlobFile& file, std::string_view prefix, const ParameterStore& store);
// Every parameter of `store` must be present with the same shape, and no
// extra entries may exist under `prefix`.
void read_parameters(const BlobFile& file, std::string_view prefix, ParameterStore& store);

void write_optimizer(BlobFile& file, std::string_view prefix, const AdamW& opt);
void read_optimizer(const BlobFile& file, std::string_view prefix, AdamW& opt);

// Opens a checkpoint and returns the embedded configuration.
BlobFile open_checkpoint(const std::string& path, RunConfig* config = nullptr);
bool has_f0_predictor(const BlobFile& file);

}  // namespace sfgan

#endif  // SFGAN_CHECKPOINT_H_
