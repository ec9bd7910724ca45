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

#ifndef CONVERSION_VOCODER_H_
#define CONVERSION_VOCODER_H_

#include <cstdint>
#include <string>

#include "config/system_config.h"
#include "frontend/features.h"
#include "frontend/wav.h"

namespace unitvc {

// Non-negative least-squares estimate of the linear power spectrum from a
// log-mel spectrogram, [frames, n_fft / 2 + 1].
RealMatrix MelToLinearPower(const MelSpectrogram& mel, const FeatureConfig& cfg,
                            int iterations = 200);

// Fast Griffin-Lim phase reconstruction from linear magnitudes. Returns
// frames * hop samples.
std::vector<double> GriffinLim(const RealMatrix& magnitude,
                               const FeatureConfig& cfg, int iterations,
                               double momentum, uint64_t seed);

// Internal fallback: mel -> linear magnitude -> Griffin-Lim.
Waveform RenderGriffinLim(const MelSpectrogram& mel, const FeatureConfig& cfg,
                          const InferenceConfig& inference);

// Writes the mel as an archive ("mel" [frames, bands], "sample_rate",
// "hop_length"), runs `command <mel_path> <wav_path>` and reads the WAV back
// at the system rate.
Waveform RenderWithCommand(const MelSpectrogram& mel, const FeatureConfig& cfg,
                           const std::string& command);

// External vocoder when configured, else the internal fallback.
Waveform RenderWaveform(const MelSpectrogram& mel, const SystemConfig& cfg);

}  // namespace unitvc

#endif  // CONVERSION_VOCODER_H_
