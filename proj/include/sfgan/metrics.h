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

// Objective analysis-synthesis metrics. Spectral metrics are evaluated in
// double precision on top of the shared STFT framing.

#ifndef SFGAN_METRICS_H_
#define SFGAN_METRICS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfgan/features.h"

namespace sfgan {

class MetricError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kSnrCapDb = 99.0;
inline constexpr double kLasFloor = 1e-5;
inline constexpr int kMcdOrder = 13;

// 10 log10(sum x^2 / sum (x - y)^2), capped at kSnrCapDb.
double snr_db(std::span<const float> reference, std::span<const float> generated);

// RMSE over all cells of 20 log10 max(|X|, kLasFloor).
double las_rmse_db(std::span<const float> reference, std::span<const float> generated,
                   const AnalysisConfig& cfg = {});

// Orthonormal DCT-II of one log-mel frame, coefficients 0..n-1.
std::vector<double> mel_cepstrum(std::span<const double> log_mel, int n);

// (10 sqrt 2 / ln 10) times the mean frame distance over c1..c_order.
double mcd_db(std::span<const float> reference, std::span<const float> generated,
              const AnalysisConfig& cfg = {}, int order = kMcdOrder);

struct F0Comparison {
  std::optional<double> rmse_cents;  // empty when no frame is voiced in both
  double vuv_error_pct = 0.0;
  int64_t voiced_frames = 0;  // frames voiced in both tracks
  int64_t frames = 0;
};
F0Comparison compare_f0(const F0Track& reference, const F0Track& generated);

struct UtteranceMetrics {
  std::string name;
  double snr_db = 0.0;
  bool snr_saturated = false;
  double las_rmse_db = 0.0;
  double mcd_db = 0.0;
  std::optional<double> f0_rmse_cents;
  double vuv_error_pct = 0.0;
  int64_t samples = 0;
  int64_t frames = 0;
  int64_t f0_frames = 0;
};

UtteranceMetrics evaluate_pair(const std::string& name, std::span<const float> reference,
                               std::span<const float> generated,
                               const AnalysisConfig& cfg = {});

struct EvalReport {
  std::vector<UtteranceMetrics> utterances;

  // Means over utterances in order; F0 RMSE over utterances where defined.
  UtteranceMetrics aggregate() const;
  void write_text(std::ostream& out) const;
  void write_tsv(std::ostream& out) const;
};

// |a - b| per cell over the common frame count.
FrameMatrix mel_diff_map(const MelSpectrogram& a, const MelSpectrogram& b);
void write_matrix_text(std::ostream& out, const FrameMatrix& m);
// Binary PGM, bands as rows (highest band on top), scaled so the largest
// value is white.
void write_pgm(std::ostream& out, const FrameMatrix& m);

}  // namespace sfgan

#endif  // SFGAN_METRICS_H_
