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

#include "sfgan/ops.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

namespace sfgan::ops {

namespace {

void require_rank3(const Tensor& t, const char* what) {
  if (t.shape().rank() != 3) {
    throw std::invalid_argument(std::string(what) +
                                ": expected (batch, channels, time), got " +
                                t.shape().str());
  }
}

void require_same_shape(const Var& a, const Var& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch " +
                                a.shape().str() + " vs " + b.shape().str());
  }
}

// Range of output indices t for which t * stride + offset lies in [0, len).
struct TapRange {
  int64_t lo;
  int64_t hi;  // exclusive
};

TapRange tap_range(int64_t offset, int64_t stride, int64_t len, int64_t out) {
  int64_t lo = 0;
  if (offset < 0) lo = (-offset + stride - 1) / stride;
  int64_t hi = 0;
  if (len - 1 - offset >= 0) hi = (len - 1 - offset) / stride + 1;
  return {lo, std::min(hi, out)};
}

template <typename F, typename G>
Var unary(const Var& x, F forward, G derivative) {
  Tensor out(x.shape());
  auto src = x.value().data();
  auto dst = out.data();
  for (size_t i = 0; i < src.size(); ++i) dst[i] = forward(src[i]);
  return x.graph().record(
      std::move(out), {x}, [derivative](BackwardContext& ctx) {
        Tensor* gx = ctx.input_grad(0);
        if (!gx) return;
        auto in = ctx.input(0).data();
        auto y = ctx.output().data();
        auto go = ctx.out_grad().data();
        auto gi = gx->data();
        for (size_t i = 0; i < gi.size(); ++i) {
          gi[i] += go[i] * derivative(in[i], y[i]);
        }
      });
}

}  // namespace

int64_t conv1d_output_length(int64_t in_len, int kernel, const ConvSpec& spec) {
  int64_t span = static_cast<int64_t>(spec.dilation) * (kernel - 1) + 1;
  int64_t numer = in_len + 2 * spec.padding - span;
  if (numer < 0) return 0;
  return numer / spec.stride + 1;
}

int64_t conv_transpose1d_output_length(int64_t in_len, int kernel, int stride,
                                       int padding) {
  return (in_len - 1) * stride - 2 * padding + kernel;
}

int64_t pool1d_output_length(int64_t in_len, int kernel, int stride,
                             int padding) {
  int64_t numer = in_len + 2 * padding - kernel;
  if (numer < 0) return 0;
  return numer / stride + 1;
}

Var conv1d(const Var& x, const Var& weight, const Var& bias,
           const ConvSpec& spec) {
  const Tensor& xv = x.value();
  const Tensor& wv = weight.value();
  require_rank3(xv, "conv1d input");
  require_rank3(wv, "conv1d weight");
  if (spec.stride < 1 || spec.dilation < 1 || spec.padding < 0 ||
      spec.groups < 1) {
    throw std::invalid_argument("conv1d: invalid stride/dilation/padding");
  }
  const int64_t batch = xv.batch(), cin = xv.channels(), tin = xv.length();
  const int64_t cout = wv.batch(), cg = wv.channels(), k = wv.length();
  if (cin % spec.groups != 0 || cout % spec.groups != 0 ||
      cg * spec.groups != cin) {
    throw std::invalid_argument("conv1d: channel mismatch, input has " +
                                std::to_string(cin) + " channels, weight " +
                                wv.shape().str());
  }
  const bool has_bias = bias.valid();
  if (has_bias && bias.value().numel() != cout) {
    throw std::invalid_argument("conv1d: bias length mismatch");
  }
  const int64_t tout = conv1d_output_length(tin, static_cast<int>(k), spec);
  if (tout < 1) throw std::invalid_argument("conv1d: output length < 1");

  const int64_t s = spec.stride, d = spec.dilation, p = spec.padding;
  const int64_t cout_g = cout / spec.groups;
  Tensor out(Shape{batch, cout, tout});
  for (int64_t b = 0; b < batch; ++b) {
    for (int64_t oc = 0; oc < cout; ++oc) {
      float* o = &out.at(b, oc, 0);
      if (has_bias) std::fill(o, o + tout, bias.value()[oc]);
      const int64_t g = oc / cout_g;
      for (int64_t icg = 0; icg < cg; ++icg) {
        const float* xi = &xv.at(b, g * cg + icg, 0);
        const float* w = &wv.at(oc, icg, 0);
        for (int64_t kk = 0; kk < k; ++kk) {
          const float wk = w[kk];
          const int64_t off = kk * d - p;
          TapRange r = tap_range(off, s, tin, tout);
          if (s == 1) {
            const float* xs = xi + off;
            for (int64_t t = r.lo; t < r.hi; ++t) o[t] += wk * xs[t];
          } else {
            for (int64_t t = r.lo; t < r.hi; ++t) o[t] += wk * xi[t * s + off];
          }
        }
      }
    }
  }

  std::vector<Var> inputs{x, weight};
  if (has_bias) inputs.push_back(bias);
  return x.graph().record(
      std::move(out), std::move(inputs),
      [=](BackwardContext& ctx) {
        const Tensor& xv = ctx.input(0);
        const Tensor& wv = ctx.input(1);
        const Tensor& go = ctx.out_grad();
        Tensor* gx = ctx.input_grad(0);
        Tensor* gw = ctx.input_grad(1);
        Tensor* gb = has_bias ? ctx.input_grad(2) : nullptr;
        for (int64_t b = 0; b < batch; ++b) {
          for (int64_t oc = 0; oc < cout; ++oc) {
            const float* gor = &go.at(b, oc, 0);
            if (gb) {
              double acc = 0.0;
              for (int64_t t = 0; t < tout; ++t) acc += gor[t];
              (*gb)[oc] += static_cast<float>(acc);
            }
            const int64_t g = oc / cout_g;
            for (int64_t icg = 0; icg < cg; ++icg) {
              const int64_t ic = g * cg + icg;
              const float* xi = &xv.at(b, ic, 0);
              float* gxi = gx ? &gx->at(b, ic, 0) : nullptr;
              for (int64_t kk = 0; kk < k; ++kk) {
                const int64_t off = kk * d - p;
                TapRange r = tap_range(off, s, tin, tout);
                if (gw) {
                  double acc = 0.0;
                  for (int64_t t = r.lo; t < r.hi; ++t) {
                    acc += static_cast<double>(gor[t]) * xi[t * s + off];
                  }
                  gw->at(oc, icg, kk) += static_cast<float>(acc);
                }
                if (gxi) {
                  const float wk = wv.at(oc, icg, kk);
                  if (s == 1) {
                    float* gxs = gxi + off;
                    for (int64_t t = r.lo; t < r.hi; ++t) gxs[t] += wk * gor[t];
                  } else {
                    for (int64_t t = r.lo; t < r.hi; ++t) {
                      gxi[t * s + off] += wk * gor[t];
                    }
                  }
                }
              }
            }
          }
        }
      });
}

Var conv_transpose1d(const Var& x, const Var& weight, const Var& bias,
                     int stride, int padding) {
  const Tensor& xv = x.value();
  const Tensor& wv = weight.value();
  require_rank3(xv, "conv_transpose1d input");
  require_rank3(wv, "conv_transpose1d weight");
  if (stride < 1 || padding < 0) {
    throw std::invalid_argument("conv_transpose1d: invalid stride/padding");
  }
  const int64_t batch = xv.batch(), cin = xv.channels(), tin = xv.length();
  const int64_t cout = wv.channels(), k = wv.length();
  if (wv.batch() != cin) {
    throw std::invalid_argument("conv_transpose1d: channel mismatch, input has " +
                                std::to_string(cin) + " channels, weight " +
                                wv.shape().str());
  }
  if (k < stride) {
    throw std::invalid_argument("conv_transpose1d: kernel smaller than stride");
  }
  const bool has_bias = bias.valid();
  if (has_bias && bias.value().numel() != cout) {
    throw std::invalid_argument("conv_transpose1d: bias length mismatch");
  }
  const int64_t tout = conv_transpose1d_output_length(tin, k, stride, padding);
  if (tout < 1) throw std::invalid_argument("conv_transpose1d: output length < 1");

  const int64_t s = stride, p = padding;
  Tensor out(Shape{batch, cout, tout});
  for (int64_t b = 0; b < batch; ++b) {
    for (int64_t oc = 0; oc < cout; ++oc) {
      float* o = &out.at(b, oc, 0);
      if (has_bias) std::fill(o, o + tout, bias.value()[oc]);
      for (int64_t ic = 0; ic < cin; ++ic) {
        const float* xi = &xv.at(b, ic, 0);
        for (int64_t kk = 0; kk < k; ++kk) {
          const float wk = wv.at(ic, oc, kk);
          const int64_t off = kk - p;
          // out[i * s + off] receives x[i]
          TapRange r = tap_range(off, s, tout, tin);
          for (int64_t i = r.lo; i < r.hi; ++i) o[i * s + off] += wk * xi[i];
        }
      }
    }
  }

  std::vector<Var> inputs{x, weight};
  if (has_bias) inputs.push_back(bias);
  return x.graph().record(
      std::move(out), std::move(inputs), [=](BackwardContext& ctx) {
        const Tensor& xv = ctx.input(0);
        const Tensor& wv = ctx.input(1);
        const Tensor& go = ctx.out_grad();
        Tensor* gx = ctx.input_grad(0);
        Tensor* gw = ctx.input_grad(1);
        Tensor* gb = has_bias ? ctx.input_grad(2) : nullptr;
        for (int64_t b = 0; b < batch; ++b) {
          for (int64_t oc = 0; oc < cout; ++oc) {
            const float* gor = &go.at(b, oc, 0);
            if (gb) {
              double acc = 0.0;
              for (int64_t t = 0; t < tout; ++t) acc += gor[t];
              (*gb)[oc] += static_cast<float>(acc);
            }
            for (int64_t ic = 0; ic < cin; ++ic) {
              const float* xi = &xv.at(b, ic, 0);
              float* gxi = gx ? &gx->at(b, ic, 0) : nullptr;
              for (int64_t kk = 0; kk < k; ++kk) {
                const int64_t off = kk - p;
                TapRange r = tap_range(off, s, tout, tin);
                if (gw) {
                  double acc = 0.0;
                  for (int64_t i = r.lo; i < r.hi; ++i) {
                    acc += static_cast<double>(xi[i]) * gor[i * s + off];
                  }
                  gw->at(ic, oc, kk) += static_cast<float>(acc);
                }
                if (gxi) {
                  const float wk = wv.at(ic, oc, kk);
                  for (int64_t i = r.lo; i < r.hi; ++i) {
                    gxi[i] += wk * gor[i * s + off];
                  }
                }
              }
            }
          }
        }
      });
}

Var max_pool1d(const Var& x, int kernel, int stride) {
  const Tensor& xv = x.value();
  require_rank3(xv, "max_pool1d");
  if (kernel < 1 || stride < 1) {
    throw std::invalid_argument("max_pool1d: kernel and stride must be >= 1");
  }
  const int64_t rows = xv.batch() * xv.channels(), tin = xv.length();
  if (tin < kernel) {
    throw std::invalid_argument("max_pool1d: window larger than input");
  }
  const int64_t tout = pool1d_output_length(tin, kernel, stride);
  Tensor out(Shape{xv.batch(), xv.channels(), tout});
  auto argmax = std::make_shared<std::vector<int64_t>>(rows * tout);
  for (int64_t r = 0; r < rows; ++r) {
    const float* xi = xv.data().data() + r * tin;
    float* o = out.data().data() + r * tout;
    for (int64_t t = 0; t < tout; ++t) {
      int64_t best = t * stride;
      for (int64_t j = 1; j < kernel; ++j) {
        if (xi[t * stride + j] > xi[best]) best = t * stride + j;
      }
      o[t] = xi[best];
      (*argmax)[r * tout + t] = best;
    }
  }
  return x.graph().record(
      std::move(out), {x}, [argmax, rows, tin, tout](BackwardContext& ctx) {
        Tensor* gx = ctx.input_grad(0);
        if (!gx) return;
        auto go = ctx.out_grad().data();
        auto gi = gx->data();
        for (int64_t r = 0; r < rows; ++r) {
          for (int64_t t = 0; t < tout; ++t) {
            gi[r * tin + (*argmax)[r * tout + t]] += go[r * tout + t];
          }
        }
      });
}

Var avg_pool1d(const Var& x, int kernel, int stride, int padding) {
  const Tensor& xv = x.value();
  require_rank3(xv, "avg_pool1d");
  if (kernel < 1 || stride < 1 || padding < 0) {
    throw std::invalid_argument("avg_pool1d: invalid kernel/stride/padding");
  }
  const int64_t rows = xv.batch() * xv.channels(), tin = xv.length();
  const int64_t tout = pool1d_output_length(tin, kernel, stride, padding);
  if (tout < 1) throw std::invalid_argument("avg_pool1d: window larger than input");
  Tensor out(Shape{xv.batch(), xv.channels(), tout});
  const float inv = 1.0f / static_cast<float>(kernel);
  for (int64_t r = 0; r < rows; ++r) {
    const float* xi = xv.data().data() + r * tin;
    float* o = out.data().data() + r * tout;
    for (int64_t t = 0; t < tout; ++t) {
      double acc = 0.0;
      for (int64_t j = 0; j < kernel; ++j) {
        int64_t idx = t * stride + j - padding;
        if (idx >= 0 && idx < tin) acc += xi[idx];
      }
      o[t] = static_cast<float>(acc) * inv;
    }
  }
  return x.graph().record(
      std::move(out), {x},
      [=](BackwardContext& ctx) {
        Tensor* gx = ctx.input_grad(0);
        if (!gx) return;
        auto go = ctx.out_grad().data();
        auto gi = gx->data();
        for (int64_t r = 0; r < rows; ++r) {
          for (int64_t t = 0; t < tout; ++t) {
            const float g = go[r * tout + t] * inv;
            for (int64_t j = 0; j < kernel; ++j) {
              int64_t idx = t * stride + j - padding;
              if (idx >= 0 && idx < tin) gi[r * tin + idx] += g;
            }
          }
        }
      });
}

Var leaky_relu(const Var& x, float slope) {
  if (!(slope > 0.0f && slope < 1.0f)) {
    throw std::invalid_argument("leaky_relu: slope must be in (0, 1)");
  }
  return unary(
      x, [slope](float v) { return v >= 0.0f ? v : slope * v; },
      [slope](float v, float) { return v >= 0.0f ? 1.0f : slope; });
}

Var relu(const Var& x) {
  return unary(
      x, [](float v) { return v > 0.0f ? v : 0.0f; },
      [](float v, float) { return v > 0.0f ? 1.0f : 0.0f; });
}

Var sigmoid(const Var& x) {
  return unary(
      x, [](float v) { return 1.0f / (1.0f + std::exp(-v)); },
      [](float, float y) { return y * (1.0f - y); });
}

Var tanh(const Var& x) {
  return unary(
      x, [](float v) { return std::tanh(v); },
      [](float, float y) { return 1.0f - y * y; });
}

Var sin(const Var& x) {
  return unary(
      x, [](float v) { return std::sin(v); },
      [](float v, float) { return std::cos(v); });
}

Var square(const Var& x) {
  return unary(
      x, [](float v) { return v * v; },
      [](float v, float) { return 2.0f * v; });
}

Var abs(const Var& x) {
  return unary(
      x, [](float v) { return std::fabs(v); },
      [](float v, float) { return v > 0.0f ? 1.0f : (v < 0.0f ? -1.0f : 0.0f); });
}

Var add(const Var& a, const Var& b) {
  require_same_shape(a, b, "add");
  Tensor out(a.shape());
  auto x = a.value().data(), y = b.value().data();
  auto o = out.data();
  for (size_t i = 0; i < o.size(); ++i) o[i] = x[i] + y[i];
  return a.graph().record(std::move(out), {a, b}, [](BackwardContext& ctx) {
    auto go = ctx.out_grad().data();
    for (size_t k = 0; k < 2; ++k) {
      if (Tensor* g = ctx.input_grad(k)) {
        auto gi = g->data();
        for (size_t i = 0; i < gi.size(); ++i) gi[i] += go[i];
      }
    }
  });
}

Var sub(const Var& a, const Var& b) {
  require_same_shape(a, b, "sub");
  Tensor out(a.shape());
  auto x = a.value().data(), y = b.value().data();
  auto o = out.data();
  for (size_t i = 0; i < o.size(); ++i) o[i] = x[i] - y[i];
  return a.graph().record(std::move(out), {a, b}, [](BackwardContext& ctx) {
    auto go = ctx.out_grad().data();
    if (Tensor* g = ctx.input_grad(0)) {
      auto gi = g->data();
      for (size_t i = 0; i < gi.size(); ++i) gi[i] += go[i];
    }
    if (Tensor* g = ctx.input_grad(1)) {
      auto gi = g->data();
      for (size_t i = 0; i < gi.size(); ++i) gi[i] -= go[i];
    }
  });
}

Var mul(const Var& a, const Var& b) {
  require_same_shape(a, b, "mul");
  Tensor out(a.shape());
  auto x = a.value().data(), y = b.value().data();
  auto o = out.data();
  for (size_t i = 0; i < o.size(); ++i) o[i] = x[i] * y[i];
  return a.graph().record(std::move(out), {a, b}, [](BackwardContext& ctx) {
    auto go = ctx.out_grad().data();
    auto x = ctx.input(0).data(), y = ctx.input(1).data();
    if (Tensor* g = ctx.input_grad(0)) {
      auto gi = g->data();
      for (size_t i = 0; i < gi.size(); ++i) gi[i] += go[i] * y[i];
    }
    if (Tensor* g = ctx.input_grad(1)) {
      auto gi = g->data();
      for (size_t i = 0; i < gi.size(); ++i) gi[i] += go[i] * x[i];
    }
  });
}

Var scale(const Var& x, float s) {
  return unary(
      x, [s](float v) { return s * v; }, [s](float, float) { return s; });
}

Var add_channel_broadcast(const Var& a, const Var& b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_rank3(av, "add_channel_broadcast");
  require_rank3(bv, "add_channel_broadcast");
  if (bv.channels() != 1 || av.batch() != bv.batch() ||
      av.length() != bv.length()) {
    throw std::invalid_argument("add_channel_broadcast: shape mismatch " +
                                av.shape().str() + " vs " + bv.shape().str());
  }
  const int64_t batch = av.batch(), ch = av.channels(), len = av.length();
  Tensor out(av.shape());
  for (int64_t b = 0; b < batch; ++b) {
    const float* y = &bv.at(b, 0, 0);
    for (int64_t c = 0; c < ch; ++c) {
      const float* x = &av.at(b, c, 0);
      float* o = &out.at(b, c, 0);
      for (int64_t t = 0; t < len; ++t) o[t] = x[t] + y[t];
    }
  }
  return a.graph().record(std::move(out), {a, b}, [=](BackwardContext& ctx) {
    const Tensor& go = ctx.out_grad();
    if (Tensor* g = ctx.input_grad(0)) {
      auto gi = g->data();
      auto gd = go.data();
      for (size_t i = 0; i < gi.size(); ++i) gi[i] += gd[i];
    }
    if (Tensor* g = ctx.input_grad(1)) {
      for (int64_t b = 0; b < batch; ++b) {
        float* gy = &g->at(b, 0, 0);
        for (int64_t c = 0; c < ch; ++c) {
          const float* gr = &go.at(b, c, 0);
          for (int64_t t = 0; t < len; ++t) gy[t] += gr[t];
        }
      }
    }
  });
}

Var select(std::span<const uint8_t> mask, const Var& a, const Var& b) {
  require_same_shape(a, b, "select");
  if (static_cast<int64_t>(mask.size()) != a.value().numel()) {
    throw std::invalid_argument("select: mask length mismatch");
  }
  auto m = std::make_shared<std::vector<uint8_t>>(mask.begin(), mask.end());
  Tensor out(a.shape());
  auto x = a.value().data(), y = b.value().data();
  auto o = out.data();
  for (size_t i = 0; i < o.size(); ++i) o[i] = (*m)[i] ? x[i] : y[i];
  return a.graph().record(std::move(out), {a, b}, [m](BackwardContext& ctx) {
    auto go = ctx.out_grad().data();
    if (Tensor* g = ctx.input_grad(0)) {
      auto gi = g->data();
      for (size_t i = 0; i < gi.size(); ++i) {
        if ((*m)[i]) gi[i] += go[i];
      }
    }
    if (Tensor* g = ctx.input_grad(1)) {
      auto gi = g->data();
      for (size_t i = 0; i < gi.size(); ++i) {
        if (!(*m)[i]) gi[i] += go[i];
      }
    }
  });
}

Var cumsum_time(const Var& x) {
  const Tensor& xv = x.value();
  const int64_t len = xv.shape()[xv.shape().rank() - 1];
  const int64_t rows = xv.numel() / len;
  Tensor out(xv.shape());
  for (int64_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (int64_t t = 0; t < len; ++t) {
      acc += xv[r * len + t];
      out[r * len + t] = static_cast<float>(acc);
    }
  }
  return x.graph().record(std::move(out), {x}, [rows, len](BackwardContext& ctx) {
    Tensor* gx = ctx.input_grad(0);
    if (!gx) return;
    const Tensor& go = ctx.out_grad();
    for (int64_t r = 0; r < rows; ++r) {
      double acc = 0.0;
      for (int64_t t = len; t-- > 0;) {
        acc += go[r * len + t];
        (*gx)[r * len + t] += static_cast<float>(acc);
      }
    }
  });
}

Var sum(const Var& x) {
  double acc = 0.0;
  for (float v : x.value().data()) acc += v;
  return x.graph().record(Tensor::scalar(static_cast<float>(acc)), {x},
                          [](BackwardContext& ctx) {
                            Tensor* gx = ctx.input_grad(0);
                            if (!gx) return;
                            const float g = ctx.out_grad()[0];
                            for (float& v : gx->data()) v += g;
                          });
}

Var mean(const Var& x) {
  const int64_t n = x.value().numel();
  double acc = 0.0;
  for (float v : x.value().data()) acc += v;
  return x.graph().record(
      Tensor::scalar(static_cast<float>(acc / n)), {x},
      [n](BackwardContext& ctx) {
        Tensor* gx = ctx.input_grad(0);
        if (!gx) return;
        const float g = ctx.out_grad()[0] / static_cast<float>(n);
        for (float& v : gx->data()) v += g;
      });
}

Var add_n(const std::vector<Var>& terms) {
  if (terms.empty()) throw std::invalid_argument("add_n: no terms");
  const Shape& shape = terms.front().shape();
  const int64_t n = terms.front().value().numel();
  std::vector<double> acc(n, 0.0);
  for (const Var& t : terms) {
    if (t.shape() != shape) {
      throw std::invalid_argument("add_n: shape mismatch " + shape.str() + " vs " +
                                  t.shape().str());
    }
    auto v = t.value().data();
    for (int64_t i = 0; i < n; ++i) acc[i] += v[i];
  }
  Tensor out(shape);
  for (int64_t i = 0; i < n; ++i) out[i] = static_cast<float>(acc[i]);
  return terms.front().graph().record(
      std::move(out), terms, [count = terms.size()](BackwardContext& ctx) {
        auto go = ctx.out_grad().data();
        for (size_t k = 0; k < count; ++k) {
          Tensor* gi = ctx.input_grad(k);
          if (!gi) continue;
          auto g = gi->data();
          for (size_t i = 0; i < g.size(); ++i) g[i] += go[i];
        }
      });
}

Var reshape(const Var& x, Shape shape) {
  Tensor out = x.value().reshaped(std::move(shape));
  return x.graph().record(std::move(out), {x}, [](BackwardContext& ctx) {
    Tensor* gx = ctx.input_grad(0);
    if (!gx) return;
    auto go = ctx.out_grad().data();
    auto gi = gx->data();
    for (size_t i = 0; i < gi.size(); ++i) gi[i] += go[i];
  });
}

Var pad_time(const Var& x, int64_t left, int64_t right) {
  const Tensor& xv = x.value();
  require_rank3(xv, "pad_time");
  if (left < 0 || right < 0) throw std::invalid_argument("pad_time: negative pad");
  const int64_t rows = xv.batch() * xv.channels(), len = xv.length();
  const int64_t out_len = len + left + right;
  Tensor out(Shape{xv.batch(), xv.channels(), out_len});
  for (int64_t r = 0; r < rows; ++r) {
    std::copy_n(xv.data().data() + r * len, len,
                out.data().data() + r * out_len + left);
  }
  return x.graph().record(std::move(out), {x}, [=](BackwardContext& ctx) {
    Tensor* gx = ctx.input_grad(0);
    if (!gx) return;
    const float* go = ctx.out_grad().data().data();
    float* gi = gx->data().data();
    for (int64_t r = 0; r < rows; ++r) {
      for (int64_t t = 0; t < len; ++t) gi[r * len + t] += go[r * out_len + left + t];
    }
  });
}

Var fold_period(const Var& x, int period) {
  const Tensor& xv = x.value();
  require_rank3(xv, "fold_period");
  const int64_t batch = xv.batch(), ch = xv.channels(), len = xv.length();
  if (period < 1 || len % period != 0) {
    throw std::invalid_argument("fold_period: length " + std::to_string(len) +
                                " is not a multiple of period " +
                                std::to_string(period));
  }
  const int64_t rows = len / period;
  Tensor out(Shape{batch * period, ch, rows});
  for (int64_t b = 0; b < batch; ++b) {
    for (int64_t j = 0; j < period; ++j) {
      for (int64_t c = 0; c < ch; ++c) {
        const float* xi = &xv.at(b, c, 0);
        float* o = &out.at(b * period + j, c, 0);
        for (int64_t i = 0; i < rows; ++i) o[i] = xi[i * period + j];
      }
    }
  }
  return x.graph().record(std::move(out), {x}, [=](BackwardContext& ctx) {
    Tensor* gx = ctx.input_grad(0);
    if (!gx) return;
    const Tensor& go = ctx.out_grad();
    for (int64_t b = 0; b < batch; ++b) {
      for (int64_t j = 0; j < period; ++j) {
        for (int64_t c = 0; c < ch; ++c) {
          float* gi = &gx->at(b, c, 0);
          const float* g = &go.at(b * period + j, c, 0);
          for (int64_t i = 0; i < rows; ++i) gi[i * period + j] += g[i];
        }
      }
    }
  });
}

Var concat_channels(const std::vector<Var>& xs) {
  if (xs.empty()) throw std::invalid_argument("concat_channels: no inputs");
  const Tensor& first = xs.front().value();
  require_rank3(first, "concat_channels");
  const int64_t batch = first.batch(), len = first.length();
  std::vector<int64_t> offsets;
  int64_t total = 0;
  for (const Var& v : xs) {
    require_rank3(v.value(), "concat_channels");
    if (v.value().batch() != batch || v.value().length() != len) {
      throw std::invalid_argument("concat_channels: shape mismatch");
    }
    offsets.push_back(total);
    total += v.value().channels();
  }
  Tensor out(Shape{batch, total, len});
  for (size_t k = 0; k < xs.size(); ++k) {
    const Tensor& v = xs[k].value();
    for (int64_t b = 0; b < batch; ++b) {
      std::copy_n(&v.at(b, 0, 0), v.channels() * len,
                  &out.at(b, offsets[k], 0));
    }
  }
  return xs.front().graph().record(
      std::move(out), xs, [=, n = xs.size()](BackwardContext& ctx) {
        const Tensor& go = ctx.out_grad();
        for (size_t k = 0; k < n; ++k) {
          Tensor* g = ctx.input_grad(k);
          if (!g) continue;
          const int64_t ch = g->channels();
          for (int64_t b = 0; b < batch; ++b) {
            const float* src = &go.at(b, offsets[k], 0);
            float* dst = &g->at(b, 0, 0);
            for (int64_t i = 0; i < ch * len; ++i) dst[i] += src[i];
          }
        }
      });
}

Var slice_channels(const Var& x, int64_t start, int64_t count) {
  const Tensor& xv = x.value();
  require_rank3(xv, "slice_channels");
  if (start < 0 || count < 1 || start + count > xv.channels()) {
    throw std::invalid_argument("slice_channels: range out of bounds");
  }
  const int64_t batch = xv.batch(), len = xv.length();
  Tensor out(Shape{batch, count, len});
  for (int64_t b = 0; b < batch; ++b) {
    std::copy_n(&xv.at(b, start, 0), count * len, &out.at(b, 0, 0));
  }
  return x.graph().record(std::move(out), {x}, [=](BackwardContext& ctx) {
    Tensor* gx = ctx.input_grad(0);
    if (!gx) return;
    const Tensor& go = ctx.out_grad();
    for (int64_t b = 0; b < batch; ++b) {
      const float* src = &go.at(b, 0, 0);
      float* dst = &gx->at(b, start, 0);
      for (int64_t i = 0; i < count * len; ++i) dst[i] += src[i];
    }
  });
}

Var bce_with_logits(const Var& logits, const Tensor& targets) {
  if (logits.value().numel() != targets.numel()) {
    throw std::invalid_argument("bce_with_logits: target length mismatch");
  }
  const int64_t n = targets.numel();
  double acc = 0.0;
  auto z = logits.value().data();
  auto y = targets.data();
  for (int64_t i = 0; i < n; ++i) {
    const double zi = z[i];
    acc += std::max(zi, 0.0) - zi * y[i] + std::log1p(std::exp(-std::fabs(zi)));
  }
  auto tgt = std::make_shared<Tensor>(targets);
  return logits.graph().record(
      Tensor::scalar(static_cast<float>(acc / n)), {logits},
      [tgt, n](BackwardContext& ctx) {
        Tensor* gz = ctx.input_grad(0);
        if (!gz) return;
        const float g = ctx.out_grad()[0] / static_cast<float>(n);
        auto z = ctx.input(0).data();
        auto gi = gz->data();
        for (int64_t i = 0; i < n; ++i) {
          const float s = 1.0f / (1.0f + std::exp(-z[i]));
          gi[i] += g * (s - (*tgt)[i]);
        }
      });
}

}  // namespace sfgan::ops
