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

#include "sfgan/generator.h"

#include <numeric>
#include <stdexcept>

namespace sfgan {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("generator config: " + what);
}

int product(const std::vector<int>& v, size_t begin, size_t end) {
  int p = 1;
  for (size_t i = begin; i < end; ++i) p *= v[i];
  return p;
}

}  // namespace

GeneratorConfig GeneratorConfig::v1() { return GeneratorConfig{}; }

GeneratorConfig GeneratorConfig::v2() {
  GeneratorConfig c;
  c.h_u = 128;
  return c;
}

GeneratorConfig GeneratorConfig::toy() {
  GeneratorConfig c;
  c.h_u = 32;
  c.k_r = {3, 7};
  c.d_r = {{1, 3, 5}, {1, 3, 5}};
  return c;
}

int GeneratorConfig::hop() const { return product(u_r, 0, u_r.size()); }

void GeneratorConfig::validate() const {
  const size_t n = u_r.size();
  require(n == 4, "exactly four upsampling stages are required");
  require(k_u.size() == n && k_m.size() == n && k_s.size() == n && d_s.size() == n,
          "k_u, u_r, k_m, k_s and d_s must all have four entries");
  require(!k_r.empty() && k_r.size() == d_r.size(), "k_r and D_r must match in length");
  require(n_mels >= 1 && pre_kernel % 2 == 1 && post_kernel % 2 == 1,
          "pre/post kernels must be odd");
  require(lrelu_slope > 0.0f && lrelu_slope < 1.0f, "lrelu slope must be in (0, 1)");
  require(h_u >= 16 && h_u % 16 == 0, "h_u must be a positive multiple of 16");
  for (size_t j = 0; j < n; ++j) {
    require(u_r[j] >= 1 && k_u[j] >= u_r[j] && (k_u[j] - u_r[j]) % 2 == 0,
            "k_u[j] - u_r[j] must be even and non-negative");
    require(k_s[j] % 2 == 1 && d_s[j] >= 1, "SubBlock kernels must be odd");
    // Stage i feeds UpBlock n-1-i, so its cumulative pool must equal the
    // remaining upsampling after that block.
    require(product(k_m, 0, j + 1) == product(u_r, n - j, n),
            "SubBlock pools must mirror the upsampling strides");
  }
  for (size_t i = 0; i < k_r.size(); ++i) {
    require(k_r[i] % 2 == 1 && !d_r[i].empty(), "PC-ResBlock kernels must be odd");
    for (int d : d_r[i]) require(d >= 1, "dilations must be >= 1");
  }
}

PCResBlock::PCResBlock(ParameterStore& store, const std::string& name, int channels,
                       int excitation_channels, int kernel,
                       const std::vector<int>& dilations, float slope, bool fused,
                       Rng& rng)
    : slope_(slope), fused_(fused) {
  for (size_t i = 0; i < dilations.size(); ++i) {
    const std::string p = name + ".d" + std::to_string(i);
    const int d = dilations[i];
    Stage s;
    if (fused) {
      s.ex_d = Conv1dLayer(store, p + ".ex_d", excitation_channels, channels, kernel,
                           Conv1dLayer::same(kernel, d), rng, false);
    }
    s.feat_d = Conv1dLayer(store, p + ".feat_d", channels, channels, kernel,
                           Conv1dLayer::same(kernel, d), rng);
    if (fused) {
      s.ex_1 = Conv1dLayer(store, p + ".ex_1", excitation_channels, channels, kernel,
                           Conv1dLayer::same(kernel), rng, false);
    }
    s.feat_1 = Conv1dLayer(store, p + ".feat_1", channels, channels, kernel,
                           Conv1dLayer::same(kernel), rng);
    stages_.push_back(std::move(s));
  }
}

Var PCResBlock::forward(Graph& g, ParameterStore& store, const Var& c,
                        const Var& e) const {
  auto f = [&](const Conv1dLayer& ex, const Conv1dLayer& feat, const Var& y) {
    Var z = feat.forward(g, store, y);
    if (fused_) z = ops::add(ex.forward(g, store, e), z);
    return ops::leaky_relu(z, slope_);
  };
  Var out = c;
  for (const Stage& s : stages_) {
    out = ops::add(f(s.ex_1, s.feat_1, f(s.ex_d, s.feat_d, out)), out);
  }
  return out;
}

Generator::Generator(const GeneratorConfig& cfg, const SourceConfig& source,
                     uint64_t seed)
    : cfg_(cfg) {
  cfg_.validate();
  if (source.hop != cfg_.hop()) {
    throw std::invalid_argument("generator: source hop differs from upsampling factor");
  }
  Rng rng = make_rng(seed, 0x67656e);
  source_ = SourceModule(store_, source, rng);
  pre_ = Conv1dLayer(store_, "gen.pre", cfg_.n_mels, cfg_.h_u, cfg_.pre_kernel,
                     Conv1dLayer::same(cfg_.pre_kernel), rng);
  const int n = static_cast<int>(cfg_.u_r.size());
  for (int j = 0; j < n; ++j) {
    const std::string p = "gen.up" + std::to_string(j);
    const int in = j == 0 ? cfg_.h_u : cfg_.width(j - 1);
    UpBlock ub;
    ub.up = ConvTranspose1dLayer(store_, p + ".conv", in, cfg_.width(j), cfg_.k_u[j],
                                 cfg_.u_r[j], (cfg_.k_u[j] - cfg_.u_r[j]) / 2, rng);
    const int e_ch = cfg_.subblock_enabled ? cfg_.width(j) : 1;
    for (size_t r = 0; r < cfg_.k_r.size(); ++r) {
      ub.mrf.emplace_back(store_, p + ".res" + std::to_string(r), cfg_.width(j), e_ch,
                          cfg_.k_r[r], cfg_.d_r[r], cfg_.lrelu_slope,
                          cfg_.pc_resblock_enabled, rng);
    }
    ups_.push_back(std::move(ub));
  }
  int in = 1;
  for (int i = 0; i < n; ++i) {
    SubBlock sb;
    sb.pool = cfg_.k_m[i];
    if (cfg_.subblock_enabled) {
      const int out = cfg_.width(n - 1 - i);
      sb.conv = Conv1dLayer(store_, "gen.sub" + std::to_string(i), in, out, cfg_.k_s[i],
                            Conv1dLayer::same(cfg_.k_s[i], cfg_.d_s[i]), rng);
      in = out;
    }
    subs_.push_back(std::move(sb));
  }
  post_ = Conv1dLayer(store_, "gen.post", cfg_.width(n - 1), 1, cfg_.post_kernel,
                      Conv1dLayer::same(cfg_.post_kernel), rng);
}

Var Generator::forward(Graph& g, const Var& mel, const Var& excitation,
                       GeneratorTrace* trace) {
  const Tensor& m = mel.value();
  const Tensor& e = excitation.value();
  if (m.shape().rank() != 3 || m.channels() != cfg_.n_mels) {
    throw std::invalid_argument("generator: mel must be (batch, " +
                                std::to_string(cfg_.n_mels) + ", frames)");
  }
  if (e.shape() != Shape{m.batch(), 1, m.length() * cfg_.hop()}) {
    throw std::invalid_argument("generator: excitation must be (batch, 1, hop * frames), got " +
                                e.shape().str());
  }
  const int n = static_cast<int>(ups_.size());
  const float slope = cfg_.lrelu_slope;

  std::vector<Var> sub(n);
  Var x = excitation;
  for (int i = 0; i < n; ++i) {
    if (subs_[i].pool > 1) x = ops::max_pool1d(x, subs_[i].pool, subs_[i].pool);
    if (cfg_.subblock_enabled) {
      x = ops::leaky_relu(subs_[i].conv.forward(g, store_, x), slope);
    }
    sub[i] = x;
    if (trace) trace->sub_lengths.push_back(x.value().length());
  }

  Var c = pre_.forward(g, store_, mel);
  for (int j = 0; j < n; ++j) {
    c = ups_[j].up.forward(g, store_, ops::leaky_relu(c, slope));
    const Var& ej = sub[n - 1 - j];
    if (ej.value().length() != c.value().length()) {
      throw std::logic_error("generator: excitation and feature lengths diverged");
    }
    Var fused_in = c;
    if (!cfg_.pc_resblock_enabled) {
      fused_in = ej.value().channels() == 1 ? ops::add_channel_broadcast(c, ej)
                                            : ops::add(c, ej);
    }
    std::vector<Var> outs;
    for (const PCResBlock& rb : ups_[j].mrf) outs.push_back(rb.forward(g, store_, fused_in, ej));
    c = outs.size() == 1 ? outs[0]
                         : ops::scale(ops::add_n(outs), 1.0f / static_cast<float>(outs.size()));
    if (trace) trace->up_lengths.push_back(c.value().length());
  }
  Var y = ops::tanh(post_.forward(g, store_, ops::leaky_relu(c, slope)));
  if (!y.value().all_finite()) throw std::runtime_error("generator: non-finite output");
  return y;
}

Var Generator::synthesize(Graph& g, const Tensor& mel, std::span<const float> f0,
                          std::span<const uint8_t> vuv, std::span<const SourceNoise> draws) {
  Var e = source_.forward(g, store_, f0, vuv, mel.batch(), draws);
  return forward(g, g.constant(mel), e);
}

std::vector<float> Generator::generate(const MelSpectrogram& mel, const F0Track& f0,
                                       Rng& rng) {
  if (static_cast<int64_t>(f0.size()) != mel.rows) {
    throw std::invalid_argument("generate: F0 and mel frame counts differ");
  }
  const auto f = upsample_f0(f0, cfg_.hop());
  const auto v = upsample_vuv(f0.vuv, cfg_.hop());
  const SourceNoise d = draw_source_noise(rng, f.size(), source_.config().sigma);
  Graph g;
  g.freeze(store_);
  Var y = synthesize(g, mel_to_tensor(mel), f, v, std::span<const SourceNoise>(&d, 1));
  return y.value().vec();
}

}  // namespace sfgan
