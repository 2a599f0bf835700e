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

// Acoustic analysis: framing, log-amplitude spectra, log-mel spectra and an
// autocorrelation F0 tracker.
//
// Framing: the signal is zero-padded at the end to a multiple of the hop,
// then reflect-padded by (n_fft - hop) / 2 on both sides. Frame l covers
// padded samples [l * hop, l * hop + n_fft), so a padded signal of T
// samples yields exactly T / hop frames and frame l is centred on original
// sample l * hop + hop / 2.

#ifndef SFGAN_FEATURES_H_
#define SFGAN_FEATURES_H_

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "sfgan/audio.h"
#include "sfgan/autograd.h"

namespace sfgan {

struct AnalysisConfig {
  int sample_rate = kDefaultSampleRate;
  int n_fft = 1024;
  int win_length = 1024;
  int hop = 256;
  int n_mels = 80;
  double fmin = 0.0;
  double fmax = 8000.0;
  double log_floor = 1e-5;
};

// Frame-major matrix (rows = frames).
struct FrameMatrix {
  int64_t rows = 0;
  int64_t cols = 0;
  std::vector<float> values;

  FrameMatrix() = default;
  FrameMatrix(int64_t r, int64_t c, float fill = 0.0f)
      : rows(r), cols(c), values(static_cast<size_t>(r * c), fill) {}

  float& at(int64_t r, int64_t c) { return values[r * cols + c]; }
  float at(int64_t r, int64_t c) const { return values[r * cols + c]; }
};

// L x n_mels natural-log mel magnitudes.
using MelSpectrogram = FrameMatrix;

struct F0Track {
  std::vector<float> f0;     // Hz, 0 where unvoiced
  std::vector<uint8_t> vuv;  // vuv[l] == (f0[l] > 0)

  size_t size() const { return f0.size(); }
};

struct F0Config {
  double min_f0 = 50.0;
  double max_f0 = 800.0;
  double voicing_threshold = 0.3;
  // Frames quieter than this RMS are unvoiced without further analysis.
  double silence_rms = 1e-4;
  // The first lag whose correlation reaches this fraction of the best one
  // wins, which suppresses sub-octave picks.
  double octave_ratio = 0.9;
};

// Zero-pads at the end to a positive multiple of `hop`.
std::vector<float> pad_to_hop(std::span<const float> samples, int hop);
// ceil(T / hop), at least 1.
int64_t frame_count(int64_t samples, int hop);

// Periodic Hann window.
std::vector<double> hann_window(int n);

// Triangular filters on the HTK mel scale, peak 1, n_mels x (n_fft/2 + 1).
class MelFilterbank {
 public:
  explicit MelFilterbank(const AnalysisConfig& cfg);

  int bands() const { return bands_; }
  int bins() const { return bins_; }
  float weight(int band, int bin) const { return weights_[band * bins_ + bin]; }
  // First and one-past-last bin with nonzero weight.
  int support_begin(int band) const { return support_[band].first; }
  int support_end(int band) const { return support_[band].second; }

 private:
  int bands_;
  int bins_;
  std::vector<float> weights_;
  std::vector<std::pair<int, int>> support_;
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// L x (n_fft/2 + 1) magnitudes |X|.
FrameMatrix magnitude_spectrogram(std::span<const float> samples,
                                  const AnalysisConfig& cfg = {});
// Natural log of the magnitude, floored at cfg.log_floor.
FrameMatrix log_amplitude_spectrogram(std::span<const float> samples,
                                      const AnalysisConfig& cfg = {});
MelSpectrogram mel_spectrogram(std::span<const float> samples,
                               const AnalysisConfig& cfg = {});

F0Track extract_f0(std::span<const float> samples,
                   const AnalysisConfig& cfg = {}, const F0Config& f0cfg = {});
std::vector<uint8_t> vuv_flags(std::span<const float> f0);

// (1, n_mels, L) tensor from a frame-major mel matrix, and back.
Tensor mel_to_tensor(const MelSpectrogram& mel);
MelSpectrogram tensor_to_mel(const Tensor& t, int64_t batch_index = 0);

// Differentiable log-mel analysis of (B, 1, T) audio with T a multiple of
// the hop; returns (B, n_mels, T / hop).
class MelAnalyzer {
 public:
  explicit MelAnalyzer(const AnalysisConfig& cfg = {});
  ~MelAnalyzer();
  MelAnalyzer(const MelAnalyzer&) = delete;
  MelAnalyzer& operator=(const MelAnalyzer&) = delete;

  const AnalysisConfig& config() const { return cfg_; }
  const MelFilterbank& filterbank() const { return fb_; }
  Var forward(const Var& audio) const;

 private:
  struct Impl;
  AnalysisConfig cfg_;
  MelFilterbank fb_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sfgan

#endif  // SFGAN_FEATURES_H_
