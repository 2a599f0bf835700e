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

#include "test_util.h"

#include <atomic>
#include <unistd.h>

namespace sfgan::testing {

std::vector<float> synthetic_utterance(double seconds, int sr, uint64_t seed) {
  const size_t n = static_cast<size_t>(seconds * sr);
  std::vector<float> out(n, 0.0f);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  struct Segment {
    double start, end;
    bool voiced;
    double f0_begin, f0_end;
  };
  const Segment segments[] = {
      {0.00, 0.35, true, 140.0, 180.0},
      {0.35, 0.50, false, 0.0, 0.0},
      {0.50, 0.85, true, 200.0, 150.0},
      {0.85, 1.00, false, 0.0, 0.0},
  };
  for (const Segment& seg : segments) {
    const size_t a = static_cast<size_t>(seg.start * seconds * sr);
    const size_t b = std::min(n, static_cast<size_t>(seg.end * seconds * sr));
    const double fade = 0.01 * sr;
    double phase = 0.0;
    for (size_t i = a; i < b; ++i) {
      const double pos = double(i - a) / std::max<double>(1.0, double(b - a));
      const double env = std::min({1.0, double(i - a) / fade, double(b - i) / fade});
      double v = 0.0;
      if (seg.voiced) {
        const double f0 = seg.f0_begin + (seg.f0_end - seg.f0_begin) * pos;
        phase += 2.0 * std::numbers::pi * f0 / sr;
        for (int h = 1; h * f0 < 4000.0; ++h) {
          const double f = h * f0;
          const double amp = std::exp(-std::pow((f - 500.0) / 300.0, 2)) +
                             0.5 * std::exp(-std::pow((f - 1500.0) / 400.0, 2)) + 0.05;
          v += amp / h * std::sin(h * phase);
        }
        v *= 0.25;
      } else {
        v = 0.03 * noise(rng);
      }
      out[i] = static_cast<float>(env * v);
    }
  }
  return out;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  dir_ = std::filesystem::temp_directory_path() /
         ("sfgan_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::create_directories(dir_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(dir_, ec);
}

}  // namespace sfgan::testing
