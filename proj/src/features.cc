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

#include "sfgan/features.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "fft.h"

namespace sfgan {

namespace {

using cd = std::complex<double>;

int64_t reflect_index(int64_t i, int64_t n) {
  if (n == 1) return 0;
  const int64_t period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

void validate(const AnalysisConfig& cfg) {
  if (cfg.hop < 1 || cfg.n_fft < cfg.hop || cfg.n_fft % 2 != 0 ||
      (cfg.n_fft - cfg.hop) % 2 != 0 || cfg.win_length > cfg.n_fft ||
      cfg.win_length < 1) {
    throw std::invalid_argument("analysis config: inconsistent fft/window/hop");
  }
}

// Analysis window of length n_fft with the Hann window centred in it.
std::vector<double> padded_window(const AnalysisConfig& cfg) {
  std::vector<double> w(cfg.n_fft, 0.0);
  auto hann = hann_window(cfg.win_length);
  const int off = (cfg.n_fft - cfg.win_length) / 2;
  std::copy(hann.begin(), hann.end(), w.begin() + off);
  return w;
}

// Signal view with the framing described in the header.
class Framer {
 public:
  Framer(std::span<const float> padded, const AnalysisConfig& cfg)
      : x_(padded), cfg_(cfg), pad_((cfg.n_fft - cfg.hop) / 2) {}

  int64_t frames() const { return static_cast<int64_t>(x_.size()) / cfg_.hop; }

  // Original-signal index of sample j of frame l.
  int64_t source_index(int64_t l, int64_t j) const {
    return reflect_index(l * cfg_.hop + j - pad_, static_cast<int64_t>(x_.size()));
  }

  void frame(int64_t l, std::span<double> out) const {
    for (int64_t j = 0; j < cfg_.n_fft; ++j) out[j] = x_[source_index(l, j)];
  }

 private:
  std::span<const float> x_;
  const AnalysisConfig& cfg_;
  int64_t pad_;
};

}  // namespace

std::vector<float> pad_to_hop(std::span<const float> samples, int hop) {
  const int64_t n = frame_count(static_cast<int64_t>(samples.size()), hop) * hop;
  std::vector<float> out(n, 0.0f);
  std::copy(samples.begin(), samples.end(), out.begin());
  return out;
}

int64_t frame_count(int64_t samples, int hop) {
  return std::max<int64_t>(1, (samples + hop - 1) / hop);
}

std::vector<double> hann_window(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  }
  return w;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank::MelFilterbank(const AnalysisConfig& cfg)
    : bands_(cfg.n_mels), bins_(cfg.n_fft / 2 + 1),
      weights_(static_cast<size_t>(bands_) * bins_, 0.0f), support_(bands_) {
  if (cfg.n_mels < 1 || cfg.fmax <= cfg.fmin || cfg.fmax > cfg.sample_rate / 2.0) {
    throw std::invalid_argument("mel filterbank: invalid band layout");
  }
  const double mlo = hz_to_mel(cfg.fmin), mhi = hz_to_mel(cfg.fmax);
  std::vector<double> edges(bands_ + 2);
  for (int i = 0; i < bands_ + 2; ++i) {
    edges[i] = mel_to_hz(mlo + (mhi - mlo) * i / (bands_ + 1));
  }
  for (int m = 0; m < bands_; ++m) {
    const double lo = edges[m], c = edges[m + 1], hi = edges[m + 2];
    int first = bins_, last = 0;
    for (int k = 0; k < bins_; ++k) {
      const double f = static_cast<double>(k) * cfg.sample_rate / cfg.n_fft;
      const double w = std::max(0.0, std::min((f - lo) / (c - lo), (hi - f) / (hi - c)));
      if (w > 0.0) {
        weights_[m * bins_ + k] = static_cast<float>(w);
        first = std::min(first, k);
        last = std::max(last, k + 1);
      }
    }
    if (first >= last) {
      throw std::invalid_argument("mel filterbank: band " + std::to_string(m) +
                                  " covers no FFT bin; use fewer bands or a larger FFT");
    }
    support_[m] = {first, last};
  }
}

FrameMatrix magnitude_spectrogram(std::span<const float> samples,
                                  const AnalysisConfig& cfg) {
  validate(cfg);
  if (samples.empty()) throw std::invalid_argument("spectrogram: empty input");
  const auto padded = pad_to_hop(samples, cfg.hop);
  Framer framer(padded, cfg);
  const auto window = padded_window(cfg);
  internal::RealFft fft(cfg.n_fft);
  FrameMatrix out(framer.frames(), fft.bins());
  std::vector<double> frame(cfg.n_fft);
  std::vector<cd> spec(fft.bins());
  for (int64_t l = 0; l < out.rows; ++l) {
    framer.frame(l, frame);
    for (int j = 0; j < cfg.n_fft; ++j) frame[j] *= window[j];
    fft.forward(frame, spec);
    for (int k = 0; k < fft.bins(); ++k) out.at(l, k) = static_cast<float>(std::abs(spec[k]));
  }
  return out;
}

FrameMatrix log_amplitude_spectrogram(std::span<const float> samples,
                                      const AnalysisConfig& cfg) {
  FrameMatrix m = magnitude_spectrogram(samples, cfg);
  const double floor = cfg.log_floor;
  for (float& v : m.values) v = static_cast<float>(std::log(std::max<double>(v, floor)));
  return m;
}

MelSpectrogram mel_spectrogram(std::span<const float> samples,
                               const AnalysisConfig& cfg) {
  const FrameMatrix mag = magnitude_spectrogram(samples, cfg);
  const MelFilterbank fb(cfg);
  MelSpectrogram mel(mag.rows, fb.bands());
  for (int64_t l = 0; l < mag.rows; ++l) {
    for (int m = 0; m < fb.bands(); ++m) {
      double acc = 0.0;
      for (int k = fb.support_begin(m); k < fb.support_end(m); ++k) {
        acc += static_cast<double>(fb.weight(m, k)) * mag.at(l, k);
      }
      mel.at(l, m) = static_cast<float>(std::log(std::max(acc, cfg.log_floor)));
    }
  }
  return mel;
}

F0Track extract_f0(std::span<const float> samples, const AnalysisConfig& cfg,
                   const F0Config& f0cfg) {
  validate(cfg);
  if (samples.empty()) throw std::invalid_argument("extract_f0: empty input");
  const auto padded = pad_to_hop(samples, cfg.hop);
  Framer framer(padded, cfg);
  const int64_t frames = framer.frames();
  const int w = cfg.n_fft;
  const int min_lag = static_cast<int>(std::ceil(cfg.sample_rate / f0cfg.max_f0));
  const int max_lag = std::min(static_cast<int>(std::floor(cfg.sample_rate / f0cfg.min_f0)),
                               w - 2);
  if (min_lag < 2 || max_lag <= min_lag + 1) {
    throw std::invalid_argument("extract_f0: F0 range incompatible with window");
  }

  F0Track track;
  track.f0.assign(frames, 0.0f);
  track.vuv.assign(frames, 0);
  std::vector<double> x(w);
  // Prefix sums of squares give the energy of any sub-window in O(1).
  std::vector<double> energy(w + 1);
  std::vector<double> r(max_lag + 2, 0.0);
  for (int64_t l = 0; l < frames; ++l) {
    framer.frame(l, x);
    energy[0] = 0.0;
    for (int n = 0; n < w; ++n) energy[n + 1] = energy[n] + x[n] * x[n];
    if (std::sqrt(energy[w] / w) < f0cfg.silence_rms) continue;

    double best = -1.0;
    for (int lag = min_lag - 1; lag <= max_lag + 1; ++lag) {
      double acc = 0.0;
      const int len = w - lag;
      for (int n = 0; n < len; ++n) acc += x[n] * x[n + lag];
      const double e0 = energy[len];
      const double e1 = energy[w] - energy[lag];
      const double denom = std::sqrt(e0 * e1);
      r[lag] = denom > 0.0 ? acc / denom : 0.0;
      if (lag >= min_lag && lag <= max_lag) best = std::max(best, r[lag]);
    }
    if (best < f0cfg.voicing_threshold) continue;

    int pick = -1;
    for (int lag = min_lag; lag <= max_lag; ++lag) {
      const bool peak = r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1];
      if (peak && r[lag] >= f0cfg.octave_ratio * best) {
        pick = lag;
        break;
      }
    }
    if (pick < 0) continue;

    double lag = pick;
    const double a = r[pick - 1], b = r[pick], c = r[pick + 1];
    const double curv = a - 2.0 * b + c;
    if (curv < 0.0) lag += 0.5 * (a - c) / curv;
    const double f0 = std::clamp(cfg.sample_rate / lag, f0cfg.min_f0, f0cfg.max_f0);
    track.f0[l] = static_cast<float>(f0);
    track.vuv[l] = 1;
  }
  return track;
}

std::vector<uint8_t> vuv_flags(std::span<const float> f0) {
  std::vector<uint8_t> out(f0.size());
  for (size_t i = 0; i < f0.size(); ++i) out[i] = f0[i] > 0.0f ? 1 : 0;
  return out;
}

Tensor mel_to_tensor(const MelSpectrogram& mel) {
  Tensor t(Shape{1, mel.cols, mel.rows});
  for (int64_t l = 0; l < mel.rows; ++l) {
    for (int64_t m = 0; m < mel.cols; ++m) t.at(0, m, l) = mel.at(l, m);
  }
  return t;
}

MelSpectrogram tensor_to_mel(const Tensor& t, int64_t batch_index) {
  MelSpectrogram mel(t.length(), t.channels());
  for (int64_t l = 0; l < mel.rows; ++l) {
    for (int64_t m = 0; m < mel.cols; ++m) mel.at(l, m) = t.at(batch_index, m, l);
  }
  return mel;
}

struct MelAnalyzer::Impl {
  explicit Impl(const AnalysisConfig& cfg) : fft(cfg.n_fft), window(padded_window(cfg)) {}
  internal::RealFft fft;
  std::vector<double> window;
};

MelAnalyzer::MelAnalyzer(const AnalysisConfig& cfg)
    : cfg_(cfg), fb_(cfg), impl_(std::make_unique<Impl>(cfg)) {
  validate(cfg);
}

MelAnalyzer::~MelAnalyzer() = default;

Var MelAnalyzer::forward(const Var& audio) const {
  const Tensor& xv = audio.value();
  if (xv.shape().rank() != 3 || xv.channels() != 1) {
    throw std::invalid_argument("MelAnalyzer: expected (batch, 1, time) audio");
  }
  const int64_t batch = xv.batch(), len = xv.length();
  if (len % cfg_.hop != 0) {
    throw std::invalid_argument("MelAnalyzer: length must be a multiple of the hop");
  }
  const int64_t frames = len / cfg_.hop;
  const int bins = impl_->fft.bins();
  const int bands = fb_.bands();

  struct Saved {
    std::vector<cd> spec;     // batch * frames * bins
    std::vector<double> mel;  // batch * frames * bands
  };
  auto saved = std::make_shared<Saved>();
  saved->spec.resize(static_cast<size_t>(batch * frames * bins));
  saved->mel.resize(static_cast<size_t>(batch * frames * bands));

  Tensor out(Shape{batch, bands, frames});
  std::vector<double> frame(cfg_.n_fft);
  for (int64_t b = 0; b < batch; ++b) {
    Framer framer(std::span<const float>(&xv.at(b, 0, 0), len), cfg_);
    for (int64_t l = 0; l < frames; ++l) {
      framer.frame(l, frame);
      for (int j = 0; j < cfg_.n_fft; ++j) frame[j] *= impl_->window[j];
      std::span<cd> spec(&saved->spec[(b * frames + l) * bins], bins);
      impl_->fft.forward(frame, spec);
      for (int m = 0; m < bands; ++m) {
        double acc = 0.0;
        for (int k = fb_.support_begin(m); k < fb_.support_end(m); ++k) {
          acc += fb_.weight(m, k) * std::abs(spec[k]);
        }
        saved->mel[(b * frames + l) * bands + m] = acc;
        out.at(b, m, l) = static_cast<float>(std::log(std::max(acc, cfg_.log_floor)));
      }
    }
  }

  return audio.graph().record(
      std::move(out), {audio},
      [this, saved, batch, len, frames, bins, bands](BackwardContext& ctx) {
        Tensor* gx = ctx.input_grad(0);
        if (!gx) return;
        const Tensor& go = ctx.out_grad();
        const int n = cfg_.n_fft;
        std::vector<double> gmag(bins);
        std::vector<cd> z(bins);
        std::vector<double> gframe(n);
        for (int64_t b = 0; b < batch; ++b) {
          Framer framer(std::span<const float>(&ctx.input(0).at(b, 0, 0), len), cfg_);
          float* gxb = &gx->at(b, 0, 0);
          for (int64_t l = 0; l < frames; ++l) {
            std::fill(gmag.begin(), gmag.end(), 0.0);
            for (int m = 0; m < bands; ++m) {
              const double mel = saved->mel[(b * frames + l) * bands + m];
              if (mel <= cfg_.log_floor) continue;
              const double g = go.at(b, m, l) / mel;
              for (int k = fb_.support_begin(m); k < fb_.support_end(m); ++k) {
                gmag[k] += g * fb_.weight(m, k);
              }
            }
            const cd* spec = &saved->spec[(b * frames + l) * bins];
            for (int k = 0; k < bins; ++k) {
              const double mag = std::abs(spec[k]);
              z[k] = mag > 0.0 ? gmag[k] * spec[k] / mag : cd(0.0, 0.0);
              // d|X_k|/dx_j = Re(X_k e^{+i 2 pi k j / N}) / |X_k|; the
              // half-weighting turns the Hermitian c2r sum into a one-sided one.
              if (k == 0 || k == bins - 1) {
                z[k] = cd(z[k].real(), 0.0);
              } else {
                z[k] *= 0.5;
              }
            }
            impl_->fft.inverse(z, gframe);
            for (int j = 0; j < n; ++j) {
              gxb[framer.source_index(l, j)] +=
                  static_cast<float>(gframe[j] * impl_->window[j]);
            }
          }
        }
      });
}

}  // namespace sfgan
