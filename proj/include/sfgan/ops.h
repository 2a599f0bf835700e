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

// Differentiable operations. Sequence tensors are rank 3, laid out as
// (batch, channels, time). Convolutions are cross-correlations.

#ifndef SFGAN_OPS_H_
#define SFGAN_OPS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "sfgan/autograd.h"
#include "sfgan/tensor.h"

namespace sfgan::ops {

struct ConvSpec {
  int stride = 1;
  int dilation = 1;
  int padding = 0;
  int groups = 1;
};

int64_t conv1d_output_length(int64_t in_len, int kernel, const ConvSpec& spec);
int64_t conv_transpose1d_output_length(int64_t in_len, int kernel, int stride,
                                       int padding);
int64_t pool1d_output_length(int64_t in_len, int kernel, int stride,
                             int padding = 0);

// weight: (out_ch, in_ch / groups, k); bias: (out_ch) or invalid Var.
Var conv1d(const Var& x, const Var& weight, const Var& bias,
           const ConvSpec& spec = {});
// weight: (in_ch, out_ch, k); bias: (out_ch) or invalid Var.
Var conv_transpose1d(const Var& x, const Var& weight, const Var& bias,
                     int stride, int padding);

Var max_pool1d(const Var& x, int kernel, int stride);
// Zero padding counts toward the window size.
Var avg_pool1d(const Var& x, int kernel, int stride, int padding);

Var leaky_relu(const Var& x, float slope);
Var relu(const Var& x);
Var sigmoid(const Var& x);
Var tanh(const Var& x);
Var sin(const Var& x);
Var square(const Var& x);
Var abs(const Var& x);

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& x, float s);
// a: (B, C, T), b: (B, 1, T); b is repeated across channels.
Var add_channel_broadcast(const Var& a, const Var& b);
// mask[i] != 0 selects a[i], otherwise b[i].
Var select(std::span<const uint8_t> mask, const Var& a, const Var& b);

// Prefix sum along the last axis.
Var cumsum_time(const Var& x);

// Scalar reductions (accumulated in double).
Var sum(const Var& x);
Var mean(const Var& x);
// Elementwise sum of equally shaped terms.
Var add_n(const std::vector<Var>& terms);

Var reshape(const Var& x, Shape shape);
Var pad_time(const Var& x, int64_t left, int64_t right);
// (B, C, T) -> (B * p, C, T / p); row b * p + j holds x[b, :, j::p].
Var fold_period(const Var& x, int period);
Var concat_channels(const std::vector<Var>& xs);
Var slice_channels(const Var& x, int64_t start, int64_t count);

// Mean binary cross-entropy between sigmoid(logits) and targets in [0,1].
Var bce_with_logits(const Var& logits, const Tensor& targets);

}  // namespace sfgan::ops

#endif  // SFGAN_OPS_H_
