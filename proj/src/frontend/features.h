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

#ifndef FRONTEND_FEATURES_H_
#define FRONTEND_FEATURES_H_

#include <cstdint>
#include <string>
#include <vector>

#include "config/system_config.h"
#include "frontend/stft.h"
#include "frontend/wav.h"

namespace unitvc {

// Log-scale mel spectrogram, [frames, n_mels].
struct MelSpectrogram {
  RealMatrix frames;
  double hop_seconds = 0.0;

  int num_frames() const { return static_cast<int>(frames.rows()); }
  int num_bands() const { return static_cast<int>(frames.cols()); }
};

struct PitchTrack {
  std::vector<double> pitch;     // Hz, or Hz offset from mean_f0 once normalized
  std::vector<uint8_t> voicing;  // 1 voiced, 0 unvoiced
  bool normalized = false;
  double mean_f0 = 0.0;

  int num_frames() const { return static_cast<int>(pitch.size()); }
};

// Frame-wise L2 norm of the linear magnitude spectrum.
struct EnergyContour {
  std::vector<double> energy;

  int num_frames() const { return static_cast<int>(energy.size()); }
};

// Throws when the waveform is shorter than one analysis window.
void CheckAnalyzable(const Waveform& wave, const FeatureConfig& cfg);

MelSpectrogram ComputeMelSpectrogram(const Waveform& wave,
                                     const FeatureConfig& cfg);
EnergyContour ComputeEnergyContour(const Waveform& wave,
                                   const FeatureConfig& cfg);
// Mel and energy from one STFT pass.
void ComputeMelAndEnergy(const Waveform& wave, const FeatureConfig& cfg,
                         MelSpectrogram* mel, EnergyContour* energy);

// Normalized-autocorrelation tracker on the mel framing (one value per mel
// frame). Unvoiced frames carry 0 Hz.
PitchTrack EstimatePitch(const Waveform& wave, const FeatureConfig& cfg);

// Subtracts the voiced-frame mean. A fully unvoiced track gets
// cfg.default_mean_f0 as its mean. Idempotent.
PitchTrack MeanNormalizePitch(const PitchTrack& track,
                              const FeatureConfig& cfg);

// Runs `command <wav_path> <out_path>`. The output file holds
// "hop_seconds <h>" followed by one "<f0_hz> <voiced 0|1>" line per frame.
// The result is resampled to `num_frames` by nearest neighbor.
PitchTrack RunPitchAdapter(const std::string& command,
                           const std::string& wav_path, int num_frames);
PitchTrack ParsePitchAdapterOutput(const std::string& text, int num_frames);

// Index i of the result is source[floor(i * source.size() / length)].
template <typename T>
std::vector<T> NearestResample(const std::vector<T>& source, size_t length) {
  std::vector<T> out(length);
  const size_t n = source.size();
  for (size_t i = 0; i < length && n > 0; ++i) out[i] = source[i * n / length];
  return out;
}

// Throws "framing mismatch" unless all per-frame features share one length.
void CheckFramingAligned(const MelSpectrogram& mel, const EnergyContour& energy,
                         const PitchTrack& pitch);

}  // namespace unitvc

#endif  // FRONTEND_FEATURES_H_
