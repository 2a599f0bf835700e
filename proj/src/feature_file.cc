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

#include "sfgan/feature_file.h"

#include <cmath>
#include <fstream>

#include "sfgan/container.h"
#include "sfgan/metrics.h"

namespace sfgan {

namespace {

constexpr const char* kFormat = "sfgan-features";

}  // namespace

Features analyze(std::span<const float> audio, const AnalysisConfig& cfg, bool with_f0) {
  Features f;
  f.mel = mel_spectrogram(audio, cfg);
  if (with_f0) f.f0 = extract_f0(audio, cfg);
  f.samples = static_cast<int64_t>(audio.size());
  f.sample_rate = cfg.sample_rate;
  return f;
}

void save_features(const std::string& path, const Features& f) {
  BlobFile file;
  file.put_string("format", kFormat);
  file.put_f32("mel", {static_cast<uint64_t>(f.mel.rows), static_cast<uint64_t>(f.mel.cols)},
               f.mel.values);
  if (f.f0) {
    file.put_f32("f0", {f.f0->f0.size()}, f.f0->f0);
    file.put_u8("vuv", f.f0->vuv);
  }
  if (f.samples) file.put_i64("samples", *f.samples);
  file.put_i64("sample_rate", f.sample_rate);
  file.save(path);
}

Features load_features(const std::string& path) {
  BlobFile file;
  try {
    file = BlobFile::load(path);
  } catch (const std::exception& e) {
    throw FeatureFileError("cannot read features " + path + ": " + e.what());
  }
  if (!file.contains("format") || file.get_string("format") != kFormat || !file.contains("mel")) {
    throw FeatureFileError(path + " is not a feature file");
  }
  Features f;
  const Blob& mel = file.get("mel");
  if (mel.dims.size() != 2) throw FeatureFileError(path + ": mel must be a matrix");
  f.mel = MelSpectrogram(static_cast<int64_t>(mel.dims[0]), static_cast<int64_t>(mel.dims[1]));
  f.mel.values = file.get_f32("mel");
  if (file.contains("f0")) {
    F0Track t;
    t.f0 = file.get_f32("f0");
    t.vuv = file.get_u8("vuv");
    if (static_cast<int64_t>(t.f0.size()) != f.mel.rows || t.vuv.size() != t.f0.size()) {
      throw FeatureFileError(path + ": F0 and mel frame counts differ");
    }
    f.f0 = std::move(t);
  }
  if (file.contains("samples")) f.samples = file.get_i64("samples");
  f.sample_rate = static_cast<int>(file.get_i64("sample_rate"));
  return f;
}

void save_mel_text(const std::string& path, const MelSpectrogram& mel) {
  std::ofstream out(path);
  if (!out) throw FeatureFileError("cannot write " + path);
  write_matrix_text(out, mel);
  if (!out) throw FeatureFileError("failed writing " + path);
}

MelSpectrogram load_mel_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FeatureFileError("cannot open " + path);
  int64_t rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 1 || cols < 1) {
    throw FeatureFileError(path + ": expected a 'rows cols' header");
  }
  MelSpectrogram mel(rows, cols);
  for (float& v : mel.values) {
    if (!(in >> v) || !std::isfinite(v)) {
      throw FeatureFileError(path + ": truncated or non-finite matrix");
    }
  }
  std::string extra;
  if (in >> extra) throw FeatureFileError(path + ": trailing data after the matrix");
  return mel;
}

}  // namespace sfgan
