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

#include "sfgan/source.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sfgan {

std::vector<float> upsample_f0(const F0Track& track, int hop) {
  const int64_t frames = static_cast<int64_t>(track.size());
  if (frames == 0) throw std::invalid_argument("upsample_f0: empty track");
  if (track.vuv.size() != track.f0.size()) {
    throw std::invalid_argument("upsample_f0: f0/vuv length mismatch");
  }
  std::vector<float> out(static_cast<size_t>(frames * hop), 0.0f);
  const double half = hop / 2.0;
  for (int64_t l = 0; l < frames; ++l) {
    if (!track.vuv[l]) continue;
    const double centre = l * hop + half;
    for (int64_t i = 0; i < hop; ++i) {
      const int64_t t = l * hop + i;
      // Pick the neighbouring frame on the side of the sample.
      const int64_t nb = t < centre ? l - 1 : l + 1;
      double f = track.f0[l];
      if (nb >= 0 && nb < frames && track.vuv[nb]) {
        const double w = std::fabs(t - centre) / hop;
        f = (1.0 - w) * track.f0[l] + w * track.f0[nb];
      }
      out[t] = static_cast<float>(f);
    }
  }
  return out;
}

std::vector<uint8_t> upsample_vuv(std::span<const uint8_t> vuv, int hop) {
  std::vector<uint8_t> out;
  out.reserve(vuv.size() * hop);
  for (uint8_t v : vuv) out.insert(out.end(), hop, v ? 1 : 0);
  return out;
}

std::vector<float> sine_excitation(std::span<const float> f0, double alpha,
                                   int sample_rate, double phi) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  std::vector<float> out(f0.size());
  double phase = 0.0;
  for (size_t t = 0; t < f0.size(); ++t) {
    if (f0[t] < 0.0f || !std::isfinite(f0[t])) {
      throw std::invalid_argument("sine_excitation: F0 must be finite and >= 0");
    }
    phase += kTwoPi * f0[t] / sample_rate;
    if (phase >= kTwoPi) phase -= kTwoPi * std::floor(phase / kTwoPi);
    out[t] = static_cast<float>(alpha * std::sin(phase + phi));
  }
  return out;
}

SourceNoise draw_source_noise(Rng& rng, size_t samples, double sigma) {
  SourceNoise d;
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  d.phi = std::numbers::pi - u(rng);
  d.noise = normal_samples(rng, samples, sigma);
  return d;
}

NoiseShaper::NoiseShaper(ParameterStore& store, const std::string& name,
                         const SourceConfig& cfg, Rng& rng)
    : in_(store, name + ".in", 1, cfg.dnn_channels, cfg.dnn_kernel,
          Conv1dLayer::same(cfg.dnn_kernel), rng),
      out_(store, name + ".out", cfg.dnn_channels, 1, cfg.dnn_kernel,
           Conv1dLayer::same(cfg.dnn_kernel), rng) {}

Var NoiseShaper::forward(Graph& g, ParameterStore& store, const Var& x) const {
  return out_.forward(g, store, ops::tanh(in_.forward(g, store, x)));
}

SourceModule::SourceModule(ParameterStore& store, const SourceConfig& cfg, Rng& rng)
    : cfg_(cfg) {
  if (!(cfg.alpha > 0.0) || !(cfg.sigma > 0.0)) {
    throw std::invalid_argument("source config: alpha and sigma must be positive");
  }
  if (cfg.dnn_enabled) shaper_ = NoiseShaper(store, "source.g", cfg, rng);
}

Var SourceModule::forward(Graph& g, ParameterStore& store, std::span<const float> f0,
                          std::span<const uint8_t> vuv, int64_t batch,
                          std::span<const SourceNoise> draws) const {
  if (batch < 1 || f0.size() % batch != 0 || vuv.size() != f0.size() ||
      draws.size() != static_cast<size_t>(batch)) {
    throw std::invalid_argument("source: per-sample input size mismatch");
  }
  const int64_t T = static_cast<int64_t>(f0.size()) / batch;
  Tensor voiced(Shape{batch, 1, T});
  Tensor scaled_noise(Shape{batch, 1, T});
  const double inv = 1.0 / (3.0 * cfg_.sigma);
  for (int64_t b = 0; b < batch; ++b) {
    const SourceNoise& d = draws[b];
    if (d.noise.size() != static_cast<size_t>(T)) {
      throw std::invalid_argument("source: noise length mismatch");
    }
    auto sine = sine_excitation(f0.subspan(b * T, T), cfg_.alpha, cfg_.sample_rate, d.phi);
    for (int64_t t = 0; t < T; ++t) {
      voiced.at(b, 0, t) = sine[t] + d.noise[t];
      scaled_noise.at(b, 0, t) = static_cast<float>(d.noise[t] * inv);
    }
  }
  Var unvoiced = g.constant(std::move(scaled_noise));
  if (cfg_.dnn_enabled) unvoiced = shaper_.forward(g, store, unvoiced);
  return ops::select(vuv, g.constant(std::move(voiced)), unvoiced);
}

ExcitationSignal SourceModule::generate(ParameterStore& store, const F0Track& track,
                                        Rng& rng) const {
  ExcitationSignal out;
  const auto f0 = upsample_f0(track, cfg_.hop);
  out.vuv = upsample_vuv(track.vuv, cfg_.hop);
  const SourceNoise d = draw_source_noise(rng, f0.size(), cfg_.sigma);
  Graph g;
  g.freeze(store);
  Var e = forward(g, store, f0, out.vuv, 1, std::span<const SourceNoise>(&d, 1));
  out.e = e.value().vec();
  return out;
}

}  // namespace sfgan
