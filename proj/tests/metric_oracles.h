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

// Brute-force reference evaluations of the spectral metrics.

#ifndef SFGAN_TESTS_METRIC_ORACLES_H_
#define SFGAN_TESTS_METRIC_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "sfgan/features.h"

namespace sfgan::testing {

// Direct STFT: zero-pad to the hop, mirror 384 samples at both ends, hann
// window, O(N^2) DFT with a twiddle table.
inline std::vector<std::vector<double>> brute_magnitudes(const std::vector<float>& x) {
  const int n = 1024, hop = 256, pad = 384;
  std::vector<double> y(x.begin(), x.end());
  y.resize((y.size() + hop - 1) / hop * hop, 0.0);
  const int64_t len = static_cast<int64_t>(y.size());
  std::vector<double> ext;
  for (int64_t i = -pad; i < len + pad; ++i) {
    int64_t j = i < 0 ? -i : i;
    if (j >= len) j = 2 * (len - 1) - j;
    ext.push_back(y[j]);
  }
  std::vector<double> cs(n), sn(n);
  for (int j = 0; j < n; ++j) {
    cs[j] = std::cos(2.0 * std::numbers::pi * j / n);
    sn[j] = std::sin(2.0 * std::numbers::pi * j / n);
  }
  std::vector<std::vector<double>> out;
  for (int64_t l = 0; l < len / hop; ++l) {
    std::vector<double> frame(n);
    for (int j = 0; j < n; ++j) {
      frame[j] = ext[l * hop + j] * (0.5 - 0.5 * cs[j]);
    }
    std::vector<double> mag(n / 2 + 1);
    for (int k = 0; k <= n / 2; ++k) {
      double re = 0.0, im = 0.0;
      for (int j = 0; j < n; ++j) {
        re += frame[j] * cs[(k * j) % n];
        im -= frame[j] * sn[(k * j) % n];
      }
      mag[k] = std::hypot(re, im);
    }
    out.push_back(mag);
  }
  return out;
}

inline double brute_las(const std::vector<float>& a, const std::vector<float>& b) {
  auto ma = brute_magnitudes(a), mb = brute_magnitudes(b);
  double acc = 0.0;
  int64_t cells = 0;
  for (size_t l = 0; l < ma.size(); ++l) {
    for (size_t k = 0; k < ma[l].size(); ++k) {
      const double d = 20.0 * std::log10(std::max(ma[l][k], 1e-5)) -
                       20.0 * std::log10(std::max(mb[l][k], 1e-5));
      acc += d * d;
      ++cells;
    }
  }
  return std::sqrt(acc / cells);
}

inline double brute_mcd(const std::vector<float>& a, const std::vector<float>& b) {
  const MelFilterbank fb(AnalysisConfig{});
  auto cep = [&](const std::vector<double>& mag) {
    std::vector<double> lm(80);
    for (int m = 0; m < 80; ++m) {
      double acc = 0.0;
      for (int k = 0; k < fb.bins(); ++k) acc += fb.weight(m, k) * mag[k];
      lm[m] = std::log(std::max(acc, 1e-5));
    }
    std::vector<double> c(14);
    for (int q = 0; q < 14; ++q) {
      double acc = 0.0;
      for (int m = 0; m < 80; ++m) acc += lm[m] * std::cos(std::numbers::pi * q * (m + 0.5) / 80);
      c[q] = acc * std::sqrt((q == 0 ? 1.0 : 2.0) / 80);
    }
    return c;
  };
  auto ma = brute_magnitudes(a), mb = brute_magnitudes(b);
  double total = 0.0;
  for (size_t l = 0; l < ma.size(); ++l) {
    auto ca = cep(ma[l]), cb = cep(mb[l]);
    double d = 0.0;
    for (int q = 1; q <= 13; ++q) d += (ca[q] - cb[q]) * (ca[q] - cb[q]);
    total += std::sqrt(d);
  }
  return 10.0 / std::log(10.0) * std::sqrt(2.0) * total / ma.size();
}

}  // namespace sfgan::testing

#endif  // SFGAN_TESTS_METRIC_ORACLES_H_
