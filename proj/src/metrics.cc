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

#include "sfgan/metrics.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace sfgan {

namespace {

void require_same_length(std::span<const float> a, std::span<const float> b, const char* what) {
  if (a.size() != b.size()) {
    throw MetricError(std::string(what) + ": length mismatch (" + std::to_string(a.size()) +
                      " vs " + std::to_string(b.size()) + " samples)");
  }
  if (a.empty()) throw MetricError(std::string(what) + ": empty signal");
}

// L x n_mels natural-log mel energies in double.
std::vector<std::vector<double>> log_mel_double(std::span<const float> x,
                                                const AnalysisConfig& cfg) {
  const FrameMatrix mag = magnitude_spectrogram(x, cfg);
  const MelFilterbank fb(cfg);
  std::vector<std::vector<double>> out(mag.rows, std::vector<double>(fb.bands()));
  for (int64_t l = 0; l < mag.rows; ++l) {
    for (int m = 0; m < fb.bands(); ++m) {
      double acc = 0.0;
      for (int k = fb.support_begin(m); k < fb.support_end(m); ++k) {
        acc += static_cast<double>(fb.weight(m, k)) * mag.at(l, k);
      }
      out[l][m] = std::log(std::max(acc, cfg.log_floor));
    }
  }
  return out;
}

}  // namespace

double snr_db(std::span<const float> reference, std::span<const float> generated) {
  require_same_length(reference, generated, "snr");
  double signal = 0.0, noise = 0.0;
  for (size_t i = 0; i < reference.size(); ++i) {
    const double x = reference[i];
    const double e = x - generated[i];
    signal += x * x;
    noise += e * e;
  }
  if (signal == 0.0) throw MetricError("snr: reference is silent");
  if (noise == 0.0) return kSnrCapDb;
  return std::min(kSnrCapDb, 10.0 * std::log10(signal / noise));
}

double las_rmse_db(std::span<const float> reference, std::span<const float> generated,
                   const AnalysisConfig& cfg) {
  require_same_length(reference, generated, "las_rmse");
  const FrameMatrix a = magnitude_spectrogram(reference, cfg);
  const FrameMatrix b = magnitude_spectrogram(generated, cfg);
  double acc = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    const double da = 20.0 * std::log10(std::max<double>(a.values[i], kLasFloor));
    const double db = 20.0 * std::log10(std::max<double>(b.values[i], kLasFloor));
    acc += (da - db) * (da - db);
  }
  return std::sqrt(acc / static_cast<double>(a.values.size()));
}

std::vector<double> mel_cepstrum(std::span<const double> log_mel, int n) {
  const size_t N = log_mel.size();
  if (n < 1 || static_cast<size_t>(n) > N) throw MetricError("mel_cepstrum: bad order");
  std::vector<double> c(n);
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (size_t j = 0; j < N; ++j) {
      acc += log_mel[j] * std::cos(std::numbers::pi * k * (2.0 * j + 1.0) / (2.0 * N));
    }
    c[k] = acc * std::sqrt((k == 0 ? 1.0 : 2.0) / N);
  }
  return c;
}

double mcd_db(std::span<const float> reference, std::span<const float> generated,
              const AnalysisConfig& cfg, int order) {
  require_same_length(reference, generated, "mcd");
  const auto a = log_mel_double(reference, cfg);
  const auto b = log_mel_double(generated, cfg);
  const double k = 10.0 * std::numbers::sqrt2 / std::numbers::ln10;
  double total = 0.0;
  for (size_t l = 0; l < a.size(); ++l) {
    const auto ca = mel_cepstrum(a[l], order + 1);
    const auto cb = mel_cepstrum(b[l], order + 1);
    double d = 0.0;
    for (int i = 1; i <= order; ++i) d += (ca[i] - cb[i]) * (ca[i] - cb[i]);
    total += std::sqrt(d);
  }
  return k * total / static_cast<double>(a.size());
}

F0Comparison compare_f0(const F0Track& reference, const F0Track& generated) {
  if (reference.size() != generated.size()) {
    throw MetricError("f0 comparison: track lengths differ (" + std::to_string(reference.size()) +
                      " vs " + std::to_string(generated.size()) + " frames)");
  }
  if (reference.size() == 0) throw MetricError("f0 comparison: empty tracks");
  F0Comparison out;
  out.frames = static_cast<int64_t>(reference.size());
  double sq = 0.0;
  int64_t mismatched = 0;
  for (size_t l = 0; l < reference.size(); ++l) {
    const bool rv = reference.vuv[l] && reference.f0[l] > 0.0f;
    const bool gv = generated.vuv[l] && generated.f0[l] > 0.0f;
    if (rv != gv) ++mismatched;
    if (rv && gv) {
      const double c = 1200.0 * std::log2(double(generated.f0[l]) / double(reference.f0[l]));
      sq += c * c;
      ++out.voiced_frames;
    }
  }
  if (out.voiced_frames > 0) out.rmse_cents = std::sqrt(sq / out.voiced_frames);
  out.vuv_error_pct = 100.0 * static_cast<double>(mismatched) / out.frames;
  return out;
}

UtteranceMetrics evaluate_pair(const std::string& name, std::span<const float> reference,
                               std::span<const float> generated, const AnalysisConfig& cfg) {
  UtteranceMetrics m;
  m.name = name;
  m.snr_db = snr_db(reference, generated);
  m.snr_saturated = m.snr_db >= kSnrCapDb;
  m.las_rmse_db = las_rmse_db(reference, generated, cfg);
  m.mcd_db = mcd_db(reference, generated, cfg);
  const auto f0 = compare_f0(extract_f0(reference, cfg), extract_f0(generated, cfg));
  m.f0_rmse_cents = f0.rmse_cents;
  m.vuv_error_pct = f0.vuv_error_pct;
  m.samples = static_cast<int64_t>(reference.size());
  m.frames = f0.frames;
  m.f0_frames = f0.voiced_frames;
  return m;
}

UtteranceMetrics EvalReport::aggregate() const {
  UtteranceMetrics a;
  a.name = "mean";
  if (utterances.empty()) return a;
  double f0_sum = 0.0;
  int f0_count = 0;
  a.snr_saturated = true;
  for (const auto& u : utterances) {
    a.snr_db += u.snr_db;
    a.snr_saturated = a.snr_saturated && u.snr_saturated;
    a.las_rmse_db += u.las_rmse_db;
    a.mcd_db += u.mcd_db;
    a.vuv_error_pct += u.vuv_error_pct;
    a.samples += u.samples;
    a.frames += u.frames;
    a.f0_frames += u.f0_frames;
    if (u.f0_rmse_cents) {
      f0_sum += *u.f0_rmse_cents;
      ++f0_count;
    }
  }
  const double n = static_cast<double>(utterances.size());
  a.snr_db /= n;
  a.las_rmse_db /= n;
  a.mcd_db /= n;
  a.vuv_error_pct /= n;
  if (f0_count > 0) a.f0_rmse_cents = f0_sum / f0_count;
  return a;
}

namespace {

std::string format_f0(const std::optional<double>& v) {
  if (!v) return "undefined";
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << *v;
  return s.str();
}

void write_record(std::ostream& out, const UtteranceMetrics& m) {
  out << m.name << '\n' << std::fixed << std::setprecision(4);
  out << "  snr_db         " << m.snr_db << (m.snr_saturated ? " (saturated)" : "") << '\n';
  out << "  las_rmse_db    " << m.las_rmse_db << '\n';
  out << "  mcd_db         " << m.mcd_db << '\n';
  out << "  f0_rmse_cent   " << format_f0(m.f0_rmse_cents) << " over " << m.f0_frames
      << " frames\n";
  out << "  vuv_error_pct  " << m.vuv_error_pct << " over " << m.frames << " frames\n";
  out << std::defaultfloat;
}

}  // namespace

void EvalReport::write_text(std::ostream& out) const {
  for (const auto& u : utterances) write_record(out, u);
  write_record(out, aggregate());
}

void EvalReport::write_tsv(std::ostream& out) const {
  out << "name\tsnr_db\tlas_rmse_db\tmcd_db\tf0_rmse_cent\tvuv_error_pct\tsamples\tframes\t"
         "f0_frames\n";
  auto row = [&](const UtteranceMetrics& m) {
    out << m.name << '\t' << std::setprecision(10) << m.snr_db << '\t' << m.las_rmse_db << '\t'
        << m.mcd_db << '\t';
    if (m.f0_rmse_cents) {
      out << *m.f0_rmse_cents;
    } else {
      out << "nan";
    }
    out << '\t' << m.vuv_error_pct << '\t' << m.samples << '\t' << m.frames << '\t'
        << m.f0_frames << '\n';
  };
  for (const auto& u : utterances) row(u);
  row(aggregate());
}

FrameMatrix mel_diff_map(const MelSpectrogram& a, const MelSpectrogram& b) {
  if (a.cols != b.cols) {
    throw MetricError("mel_diff_map: band counts differ (" + std::to_string(a.cols) + " vs " +
                      std::to_string(b.cols) + ")");
  }
  FrameMatrix d(std::min(a.rows, b.rows), a.cols);
  for (int64_t l = 0; l < d.rows; ++l) {
    for (int64_t m = 0; m < d.cols; ++m) d.at(l, m) = std::fabs(a.at(l, m) - b.at(l, m));
  }
  return d;
}

void write_matrix_text(std::ostream& out, const FrameMatrix& m) {
  out << m.rows << ' ' << m.cols << '\n' << std::setprecision(9);
  for (int64_t l = 0; l < m.rows; ++l) {
    for (int64_t c = 0; c < m.cols; ++c) out << (c ? " " : "") << m.at(l, c);
    out << '\n';
  }
}

void write_pgm(std::ostream& out, const FrameMatrix& m) {
  float peak = 0.0f;
  for (float v : m.values) peak = std::max(peak, v);
  out << "P5\n" << m.rows << ' ' << m.cols << "\n255\n";
  for (int64_t c = m.cols - 1; c >= 0; --c) {
    for (int64_t l = 0; l < m.rows; ++l) {
      const float v = peak > 0.0f ? m.at(l, c) / peak : 0.0f;
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0f * v))));
    }
  }
}

}  // namespace sfgan
