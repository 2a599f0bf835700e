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

#ifndef SFGAN_AUDIO_H_
#define SFGAN_AUDIO_H_

#include <stdexcept>
#include <string>
#include <vector>

namespace sfgan {

inline constexpr int kDefaultSampleRate = 22050;

struct AudioBuffer {
  std::vector<float> samples;
  int sample_rate = kDefaultSampleRate;

  size_t size() const { return samples.size(); }
};

class WavError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// RIFF/WAVE, PCM-16, mono only.
AudioBuffer read_wav(const std::string& path);
// Samples are clamped to [-1, 1] and quantized to 16 bits.
void write_wav(const std::string& path, const AudioBuffer& audio);

}  // namespace sfgan

#endif  // SFGAN_AUDIO_H_
