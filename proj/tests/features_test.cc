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

#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "doctest.h"
#include "sfgan/audio.h"
#include "sfgan/features.h"
#include "sfgan/nn.h"
#include "test_util.h"

using namespace sfgan;
using sfgan::testing::TempDir;

namespace {

void put_u32(std::ofstream& f, uint32_t v) { f.write(reinterpret_cast<char*>(&v), 4); }
void put_u16(std::ofstream& f, uint16_t v) { f.write(reinterpret_cast<char*>(&v), 2); }

// Hand-rolled RIFF header so the reader is exercised on formats the writer
// never produces.
void write_raw_wav(const std::string& path, uint16_t channels, uint16_t bits,
                   uint32_t frames) {
  std::ofstream f(path, std::ios::binary);
  const uint32_t block = channels * bits / 8;
  const uint32_t data = frames * block;
  f.write("RIFF", 4);
  put_u32(f, 36 + data);
  f.write("WAVEfmt ", 8);
  put_u32(f, 16);
  put_u16(f, 1);
  put_u16(f, channels);
  put_u32(f, 22050);
  put_u32(f, 22050 * block);
  put_u16(f, static_cast<uint16_t>(block));
  put_u16(f, bits);
  f.write("data", 4);
  put_u32(f, data);
  std::vector<char> zeros(data, 0);
  f.write(zeros.data(), data);
}

std::vector<double> frame_of(const std::vector<float>& x, size_t start, size_t n) {
  std::vector<double> out(n);
  const auto w = hann_window(static_cast<int>(n));
  for (size_t j = 0; j < n; ++j) out[j] = x[start + j] * w[j];
  return out;
}

}  // namespace

TEST_CASE("wav round trip is within one quantization step") {
  TempDir dir;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<float> dist(-1.2f, 1.2f);
  AudioBuffer in;
  for (int i = 0; i < 5000; ++i) in.samples.push_back(dist(rng));
  write_wav(dir.path("a.wav"), in);
  AudioBuffer out = read_wav(dir.path("a.wav"));
  REQUIRE(out.size() == in.size());
  CHECK(out.sample_rate == 22050);
  for (size_t i = 0; i < in.size(); ++i) {
    const float expect = std::clamp(in.samples[i], -1.0f, 1.0f);
    CHECK(std::fabs(out.samples[i] - expect) <= 1.0f / 32768.0f);
  }
}

TEST_CASE("wav reader rejects unsupported formats") {
  TempDir dir;
  write_raw_wav(dir.path("stereo.wav"), 2, 16, 100);
  write_raw_wav(dir.path("u8.wav"), 1, 8, 100);
  write_raw_wav(dir.path("ok.wav"), 1, 16, 100);
  CHECK_THROWS_AS(read_wav(dir.path("stereo.wav")), WavError);
  CHECK_THROWS_AS(read_wav(dir.path("u8.wav")), WavError);
  CHECK(read_wav(dir.path("ok.wav")).size() == 100);
  CHECK_THROWS_AS(read_wav(dir.path("missing.wav")), WavError);
  {
    std::ofstream f(dir.path("junk.wav"), std::ios::binary);
    f << "not a wave file at all";
  }
  CHECK_THROWS_AS(read_wav(dir.path("junk.wav")), WavError);
}

TEST_CASE("frame counts") {
  CHECK(frame_count(8192, 256) == 32);
  CHECK(frame_count(8193, 256) == 33);
  CHECK(frame_count(1, 256) == 1);
  std::vector<float> x(8192, 0.1f);
  CHECK(log_amplitude_spectrogram(x).rows == 32);
  CHECK(log_amplitude_spectrogram(x).cols == 513);
  std::vector<float> y(300, 0.1f);
  CHECK(mel_spectrogram(y).rows == 2);
  CHECK(pad_to_hop(y, 256).size() == 512);
}

TEST_CASE("sine at an exact bin peaks at that bin in every frame") {
  for (int k : {10, 37, 100, 300}) {
    const double f = 22050.0 * k / 1024.0;
    auto x = sfgan::testing::sine(f, 22050, 8192);
    auto spec = log_amplitude_spectrogram(x);
    for (int64_t l = 0; l < spec.rows; ++l) {
      std::vector<double> row(spec.cols);
      for (int64_t c = 0; c < spec.cols; ++c) row[c] = spec.at(l, c);
      const auto peak = static_cast<int>(sfgan::testing::argmax(row));
      // The two edge frames see a reflected copy of the sine.
      const bool edge = l == 0 || l == spec.rows - 1;
      CHECK(std::abs(peak - k) <= (edge ? 1 : 0));
    }
  }
}

TEST_CASE("interior frames match a direct DFT") {
  std::mt19937_64 rng(5);
  auto x = sfgan::testing::synthetic_utterance(0.5, 22050, 5);
  auto mag = magnitude_spectrogram(x);
  // Frame l covers samples [l*256 - 384, l*256 + 640) of the signal.
  for (int64_t l : {2, 10, 20}) {
    auto ref = sfgan::testing::dft_magnitude(frame_of(x, l * 256 - 384, 1024));
    for (size_t k = 0; k < ref.size(); ++k) {
      CHECK(mag.at(l, k) == doctest::Approx(ref[k]).epsilon(1e-4).scale(1e-3));
    }
  }
}

TEST_CASE("silence hits the log floor") {
  std::vector<float> x(4096, 0.0f);
  auto las = log_amplitude_spectrogram(x);
  for (float v : las.values) CHECK(v == doctest::Approx(std::log(1e-5)));
  auto mel = mel_spectrogram(x);
  CHECK(mel.cols == 80);
  for (float v : mel.values) CHECK(v == doctest::Approx(std::log(1e-5)));
}

TEST_CASE("mel filterbank rows are non-empty and compact") {
  MelFilterbank fb(AnalysisConfig{});
  CHECK(fb.bands() == 80);
  CHECK(fb.bins() == 513);
  for (int m = 0; m < fb.bands(); ++m) {
    double sum = 0.0;
    for (int k = 0; k < fb.bins(); ++k) {
      const bool inside = k >= fb.support_begin(m) && k < fb.support_end(m);
      if (!inside) CHECK(fb.weight(m, k) == 0.0f);
      sum += fb.weight(m, k);
    }
    CHECK(sum > 0.0);
    CHECK(fb.support_end(m) - fb.support_begin(m) < fb.bins() / 2);
    if (m > 0) CHECK(fb.support_begin(m) >= fb.support_begin(m - 1));
  }
  // Nothing above 8 kHz.
  const int top = static_cast<int>(std::ceil(8000.0 * 1024 / 22050));
  for (int k = top + 1; k < fb.bins(); ++k) CHECK(fb.weight(79, k) == 0.0f);
  CHECK(mel_to_hz(hz_to_mel(1234.5)) == doctest::Approx(1234.5));
}

TEST_CASE("doubling amplitude shifts unfloored mel cells by log 2") {
  auto x = sfgan::testing::synthetic_utterance(0.5, 22050, 9);
  std::vector<float> x2(x.size());
  for (size_t i = 0; i < x.size(); ++i) x2[i] = 2.0f * x[i];
  auto a = mel_spectrogram(x), b = mel_spectrogram(x2);
  const float floor = static_cast<float>(std::log(1e-5)) + 0.5f;
  int checked = 0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    if (a.values[i] < floor) continue;
    CHECK(b.values[i] - a.values[i] == doctest::Approx(std::log(2.0)).epsilon(1e-4));
    ++checked;
  }
  CHECK(checked > 1000);
}

TEST_CASE("mel and F0 frame counts agree") {
  for (size_t n : {256u, 1000u, 8192u, 22050u}) {
    auto x = sfgan::testing::synthetic_utterance(double(n) / 22050, 22050, n);
    x.resize(n);
    CHECK(mel_spectrogram(x).rows == static_cast<int64_t>(extract_f0(x).size()));
  }
}

TEST_CASE("F0 of a 220.5 Hz sine") {
  auto x = sfgan::testing::sine(220.5, 22050, 22050);
  auto track = extract_f0(x);
  int voiced = 0;
  for (size_t l = 0; l < track.size(); ++l) {
    CHECK(bool(track.vuv[l]) == (track.f0[l] > 0.0f));
    if (track.vuv[l]) {
      ++voiced;
      CHECK(std::fabs(track.f0[l] - 220.5) <= 2.0);
    }
  }
  CHECK(voiced >= static_cast<int>(track.size()) - 2);
}

TEST_CASE("F0 tracks low and high pitches within range") {
  for (double f : {80.0, 150.0, 400.0, 700.0}) {
    auto x = sfgan::testing::sine(f, 22050, 8192, 0.3);
    auto track = extract_f0(x);
    for (size_t l = 2; l + 2 < track.size(); ++l) {
      CAPTURE(f);
      REQUIRE(track.vuv[l]);
      CHECK(track.f0[l] == doctest::Approx(f).epsilon(0.01));
    }
  }
}

TEST_CASE("white noise is mostly unvoiced and silence fully unvoiced") {
  Rng rng = make_rng(11);
  auto noise = normal_samples(rng, 22050 * 2, 0.1);
  auto track = extract_f0(noise);
  const auto unvoiced = std::count(track.vuv.begin(), track.vuv.end(), 0);
  CHECK(double(unvoiced) >= 0.9 * track.size());

  std::vector<float> silence(10000, 0.0f);
  auto st = extract_f0(silence);
  for (auto v : st.vuv) CHECK(v == 0);
  for (auto f : st.f0) CHECK(f == 0.0f);
}

TEST_CASE("vuv flags") {
  std::vector<float> a{0.0f, 220.0f, 0.0f};
  CHECK(vuv_flags(a) == std::vector<uint8_t>{0, 1, 0});
  std::vector<float> z(5, 0.0f), p(4, 100.0f);
  CHECK(vuv_flags(z) == std::vector<uint8_t>(5, 0));
  CHECK(vuv_flags(p) == std::vector<uint8_t>(4, 1));
}

TEST_CASE("mel tensor conversion round trip") {
  auto x = sfgan::testing::synthetic_utterance(0.2, 22050, 1);
  auto mel = mel_spectrogram(x);
  Tensor t = mel_to_tensor(mel);
  CHECK(t.shape() == Shape{1, 80, mel.rows});
  auto back = tensor_to_mel(t);
  CHECK(back.values == mel.values);
}

TEST_CASE("differentiable mel matches the reference extractor") {
  auto x = sfgan::testing::synthetic_utterance(0.3, 22050, 4);
  x.resize(x.size() / 256 * 256);
  MelAnalyzer analyzer;
  Graph g;
  Var y = analyzer.forward(g.constant(Tensor::signal(x)));
  auto ref = mel_spectrogram(x);
  auto got = tensor_to_mel(y.value());
  REQUIRE(got.rows == ref.rows);
  for (size_t i = 0; i < ref.values.size(); ++i) {
    CHECK(got.values[i] == doctest::Approx(ref.values[i]).epsilon(1e-4).scale(1e-3));
  }
}

TEST_CASE("differentiable mel gradient matches finite differences") {
  AnalysisConfig cfg;
  cfg.n_fft = 64;
  cfg.win_length = 64;
  cfg.hop = 16;
  cfg.n_mels = 8;
  cfg.fmax = 8000.0;
  MelAnalyzer analyzer(cfg);
  std::mt19937_64 rng(8);
  ParameterStore store;
  store.add("x", sfgan::testing::random_tensor(Shape{2, 1, 64}, rng, -0.5, 0.5));
  auto result = sfgan::testing::grad_check(
      store, [&](Graph& g, ParameterStore& s) { return analyzer.forward(g.param(s.get("x"))); },
      1e-3);
  CHECK(result.checked == 128);
  CHECK(result.max_rel_error < 1e-3);
}

TEST_CASE("wav round trip changes the log spectrum by under 0.01 dB") {
  TempDir dir;
  auto x = sfgan::testing::synthetic_utterance(1.0, 22050, 2);
  // Recorded speech always carries a broadband noise floor; without one the
  // empty upper band is pure quantization noise.
  Rng rng = make_rng(2);
  auto floor = normal_samples(rng, x.size(), 0.03);
  for (size_t i = 0; i < x.size(); ++i) x[i] += floor[i];
  write_wav(dir.path("u.wav"), AudioBuffer{x, 22050});
  auto y = read_wav(dir.path("u.wav")).samples;
  auto a = log_amplitude_spectrogram(x), b = log_amplitude_spectrogram(y);
  double acc = 0.0;
  const double to_db = 20.0 / std::log(10.0);
  for (size_t i = 0; i < a.values.size(); ++i) {
    const double d = to_db * (a.values[i] - b.values[i]);
    acc += d * d;
  }
  CHECK(std::sqrt(acc / a.values.size()) < 0.01);
}
