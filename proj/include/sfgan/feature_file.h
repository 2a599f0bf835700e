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

// Feature files are BlobFiles with
//
//   format        string "sfgan-features"
//   mel           f32 [frames, n_mels], natural-log mel energies
//   f0, vuv       optional f32 / u8 [frames]
//   samples       optional i64, length of the analysed audio
//   sample_rate   i64
//
// A mel matrix may also be exchanged as plain text: a "rows cols" header
// followed by one frame per line.

#ifndef SFGAN_FEATURE_FILE_H_
#define SFGAN_FEATURE_FILE_H_

#include <optional>
#include <stdexcept>
#include <string>

#include "sfgan/features.h"

namespace sfgan {

class FeatureFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Features {
  MelSpectrogram mel;
  std::optional<F0Track> f0;
  std::optional<int64_t> samples;
  int sample_rate = kDefaultSampleRate;
};

Features analyze(std::span<const float> audio, const AnalysisConfig& cfg, bool with_f0 = true);

void save_features(const std::string& path, const Features& f);
Features load_features(const std::string& path);

void save_mel_text(const std::string& path, const MelSpectrogram& mel);
MelSpectrogram load_mel_text(const std::string& path);

}  // namespace sfgan

#endif  // SFGAN_FEATURE_FILE_H_
