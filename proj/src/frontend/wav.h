// Copyright (c) 2026 The unitvc Authors
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

#ifndef FRONTEND_WAV_H_
#define FRONTEND_WAV_H_

#include <string>
#include <vector>

namespace unitvc {

struct Waveform {
  std::vector<double> samples;
  int sample_rate = 0;

  double seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

// Decodes RIFF/WAVE bytes: PCM 8/16/24/32-bit, IEEE float 32/64-bit, mono or
// multichannel (averaged to mono). Integer PCM is scaled to [-1, 1].
Waveform DecodeWav(const std::string& bytes);
Waveform ReadWav(const std::string& path);

// Reads, downmixes and resamples to `target_rate`. Throws on unreadable files,
// unsupported encodings and "empty audio".
Waveform LoadWaveform(const std::string& path, int target_rate);

// 16-bit PCM mono; samples are clipped to [-1, 1].
std::string EncodeWav(const Waveform& wave);
void WriteWav(const std::string& path, const Waveform& wave);

// Band-limited (windowed sinc) resampling. Output length is
// round(samples.size() * to_rate / from_rate).
std::vector<double> Resample(const std::vector<double>& samples, int from_rate,
                             int to_rate);

}  // namespace unitvc

#endif  // FRONTEND_WAV_H_
